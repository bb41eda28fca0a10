#include "tcstruct/pipeline.hpp"

#include "tcstruct/analogs.hpp"
#include "tcstruct/design.hpp"
#include "tcstruct/error.hpp"
#include "tcstruct/forecast.hpp"
#include "tcstruct/gam.hpp"
#include "tcstruct/image_dynamics.hpp"
#include "tcstruct/io.hpp"
#include "tcstruct/lasso.hpp"
#include "tcstruct/metrics.hpp"
#include "tcstruct/orb.hpp"
#include "tcstruct/pca.hpp"
#include "tcstruct/samples.hpp"
#include "tcstruct/stack.hpp"
#include "tcstruct/svg.hpp"
#include "tcstruct/synth.hpp"
#include "tcstruct/var.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace tcs {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path library_dir(const RunConfig& config, const fs::path& out) {
    return config.synthetic_input ? out / "library" : config.library_dir;
}

void write_notes(const fs::path& out, const std::string& stage, const json& notes) {
    fs::create_directories(out / "notes");
    write_file_atomic(out / "notes" / (stage + ".json"), notes.dump(2) + "\n");
}

// --- persisted samples ---

struct SampleMeta {
    std::string storm_id;
    UtcTime time;
    double vmax = 0.0;
    std::string file;
    double center_lat = 0.0;
    double center_lon = 0.0;
};

struct SamplesIndex {
    GridGeom geom;
    double cadence_hours = 6.0;
    std::vector<SampleMeta> entries;
};

SamplesIndex load_samples_index(const fs::path& out) {
    json doc;
    try {
        doc = json::parse(read_file(out / "samples" / "manifest.json"));
    } catch (const json::exception& e) {
        throw ParseError("bad samples manifest: " + std::string(e.what()));
    }
    SamplesIndex index;
    index.geom.half_width_km = doc.at("grid").at("half_width_km").get<double>();
    index.geom.step_km = doc.at("grid").at("step_km").get<double>();
    index.cadence_hours = doc.at("cadence_hours").get<double>();
    for (const json& e : doc.at("samples")) {
        SampleMeta meta;
        meta.storm_id = e.at("storm_id").get<std::string>();
        meta.time = parse_iso8601(e.at("time").get<std::string>());
        meta.vmax = e.at("vmax").get<double>();
        meta.file = e.at("file").get<std::string>();
        meta.center_lat = e.at("center_lat").get<double>();
        meta.center_lon = e.at("center_lon").get<double>();
        index.entries.push_back(std::move(meta));
    }
    return index;
}

CenteredImage load_sample_image(const fs::path& out, const SamplesIndex& index,
                                const SampleMeta& meta) {
    CenteredImage img = make_centered_image(index.geom, meta.center_lat, meta.center_lon, meta.time);
    std::uint32_t w = 0, h = 0;
    read_tcir1_file(out / "samples" / meta.file, w, h, img.temps);
    if (static_cast<int>(w) != img.side || static_cast<int>(h) != img.side)
        throw DataError("sample " + meta.file + " does not match the configured grid");
    return img;
}

// --- persisted ORB vectors ---

struct OrbRows {
    int d = 0;
    std::vector<std::string> storm_id;
    std::vector<UtcTime> time;
    Eigen::MatrixXd X; // n x d
};

void save_orb_csv(const fs::path& out, const OrbRows& rows) {
    std::ostringstream csv;
    csv << "storm_id,time";
    for (int j = 0; j < rows.d; ++j) csv << ",x" << j;
    csv << "\n";
    for (Eigen::Index i = 0; i < rows.X.rows(); ++i) {
        csv << rows.storm_id[i] << ',' << format_iso8601(rows.time[i]);
        for (int j = 0; j < rows.d; ++j) csv << ',' << format_double(rows.X(i, j));
        csv << "\n";
    }
    write_file_atomic(out / "orb.csv", csv.str());
}

OrbRows load_orb_csv(const fs::path& out) {
    std::ifstream in(out / "orb.csv");
    if (!in) throw Error("cannot open " + (out / "orb.csv").string() + " (run extract first)");
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty orb.csv");
    OrbRows rows;
    rows.d = static_cast<int>(split_csv_line(line).size()) - 2;

    std::vector<std::vector<double>> data;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const std::vector<std::string> f = split_csv_line(line);
        if (static_cast<int>(f.size()) != rows.d + 2) throw ParseError("bad orb.csv row");
        rows.storm_id.push_back(f[0]);
        rows.time.push_back(parse_iso8601(f[1]));
        std::vector<double> x(rows.d);
        for (int j = 0; j < rows.d; ++j) x[j] = parse_double(f[2 + j], "orb.csv");
        data.push_back(std::move(x));
    }
    rows.X.resize(data.size(), rows.d);
    for (std::size_t i = 0; i < data.size(); ++i)
        rows.X.row(i) = Eigen::Map<const Eigen::VectorXd>(data[i].data(), rows.d);
    return rows;
}

// Per-storm series in file order (rows are written time-sorted per storm).
struct StormSeries {
    std::string storm_id;
    std::vector<UtcTime> times;
    std::vector<Eigen::Index> row_index; // into OrbRows.X
};

std::vector<StormSeries> group_by_storm(const OrbRows& rows) {
    std::vector<StormSeries> storms;
    std::map<std::string, std::size_t> pos;
    for (Eigen::Index i = 0; i < rows.X.rows(); ++i) {
        auto it = pos.find(rows.storm_id[i]);
        if (it == pos.end()) {
            pos[rows.storm_id[i]] = storms.size();
            storms.push_back({rows.storm_id[i], {}, {}});
            it = pos.find(rows.storm_id[i]);
        }
        storms[it->second].times.push_back(rows.time[i]);
        storms[it->second].row_index.push_back(i);
    }
    return storms;
}

// Maximal contiguous runs at the cadence, as (start, length) into the series.
std::vector<std::pair<std::size_t, std::size_t>> contiguous_runs(const std::vector<UtcTime>& times,
                                                                 std::int64_t cadence_secs) {
    std::vector<std::pair<std::size_t, std::size_t>> runs;
    std::size_t start = 0;
    for (std::size_t i = 1; i <= times.size(); ++i) {
        if (i == times.size() || times[i] - times[i - 1] != cadence_secs) {
            runs.push_back({start, i - start});
            start = i;
        }
    }
    if (times.empty()) runs.clear();
    return runs;
}

std::int64_t cadence_secs(const RunConfig& config) {
    return static_cast<std::int64_t>(config.cadence_hours * 3600.0);
}

Split storm_split(const RunConfig& config, const std::string& storm_id) {
    return split_of(storm_id, config.train_fraction, config.validation_fraction);
}

Eigen::MatrixXd project_series(const PcBasis& basis, const OrbRows& rows, const StormSeries& storm) {
    Eigen::MatrixXd X(storm.row_index.size(), rows.d);
    for (std::size_t i = 0; i < storm.row_index.size(); ++i)
        X.row(i) = rows.X.row(storm.row_index[i]);
    return pca_project_rows(basis, X);
}

std::vector<CoeffSample> make_coeff_samples(const RunConfig& config, const fs::path& out,
                                            const OrbRows& rows, const PcBasis& basis,
                                            Split wanted, bool any_split = false) {
    const SamplesIndex samples = load_samples_index(out);
    std::map<std::pair<std::string, std::int64_t>, double> vmax_by_key;
    for (const SampleMeta& meta : samples.entries)
        vmax_by_key[{meta.storm_id, meta.time.secs}] = meta.vmax;

    const Eigen::MatrixXd Z = pca_project_rows(basis, rows.X);
    std::vector<CoeffSample> coeff;
    for (Eigen::Index i = 0; i < Z.rows(); ++i) {
        if (!any_split && storm_split(config, rows.storm_id[i]) != wanted) continue;
        const auto it = vmax_by_key.find({rows.storm_id[i], rows.time[i].secs});
        if (it == vmax_by_key.end()) continue;
        CoeffSample s;
        s.storm_id = rows.storm_id[i];
        s.time = rows.time[i];
        s.vmax = it->second;
        s.z = Z.row(i);
        coeff.push_back(std::move(s));
    }
    return coeff;
}

std::vector<TrajWindow> split_windows(const RunConfig& config, const OrbRows& rows,
                                      const PcBasis& basis, Split wanted) {
    std::vector<TrajWindow> windows;
    for (const StormSeries& storm : group_by_storm(rows)) {
        if (storm_split(config, storm.storm_id) != wanted) continue;
        const Eigen::MatrixXd z = project_series(basis, rows, storm);
        const auto w = extract_windows(storm.storm_id, storm.times, z, config.window_len,
                                       static_cast<int>(config.cadence_hours),
                                       config.window_stride);
        windows.insert(windows.end(), w.begin(), w.end());
    }
    return windows;
}

} // namespace

void stage_synth(const RunConfig& config, const fs::path& out) {
    if (!config.synthetic_input)
        throw DataError("synth stage requested but input.kind is \"paths\"");
    fs::create_directories(out);
    LibraryConfig lib;
    lib.n_storms = config.synth_n_storms;
    lib.geom = config.grid;
    lib.start_year = config.synth_start_year;
    lib.seed = config.seed;
    std::vector<StormSimConfig> regimes = default_regimes();
    for (StormSimConfig& r : regimes) {
        r.steps = config.synth_steps;
        r.cadence_hours = config.cadence_hours;
    }
    lib.regimes = std::move(regimes);
    const LibraryPaths paths = generate_library(lib, library_dir(config, out));

    json notes;
    notes["n_storms"] = config.synth_n_storms;
    notes["library"] = paths.root.string();
    write_notes(out, "synth", notes);
}

void stage_ingest(const RunConfig& config, const fs::path& out) {
    const fs::path lib = library_dir(config, out);
    if (!fs::exists(lib / "library_manifest.json"))
        throw DataError("library manifest not found under " + lib.string());
    const LibraryPaths paths = read_library_manifest(lib);
    const Hurdat2Result tracks = parse_hurdat2_file(paths.hurdat2.string());
    std::map<std::string, const StormTrack*> track_by_id;
    for (const StormTrack& t : tracks.tracks) track_by_id[t.storm_id] = &t;

    fs::create_directories(out / "samples");
    SampleBuildOptions options;
    options.cadence_hours = config.cadence_hours;
    options.tolerance_minutes = config.tolerance_minutes;
    options.geom = config.grid;

    json manifest;
    manifest["grid"]["half_width_km"] = config.grid.half_width_km;
    manifest["grid"]["step_km"] = config.grid.step_km;
    manifest["cadence_hours"] = config.cadence_hours;
    manifest["samples"] = json::array();
    SampleBuildSummary totals;
    int storms_without_track = 0;
    char name[64];

    for (const LibraryStorm& storm : paths.storms) {
        const auto track = track_by_id.find(storm.storm_id);
        if (track == track_by_id.end()) {
            ++storms_without_track;
            continue;
        }
        const std::vector<IrFrame> frames = read_ir_stack(storm.manifest);
        SampleBuildSummary summary;
        const std::vector<Sample> samples =
            build_samples(frames, *track->second, options, &summary);
        totals.emitted += summary.emitted;
        totals.skipped_no_frame += summary.skipped_no_frame;
        totals.skipped_no_vmax += summary.skipped_no_vmax;

        for (std::size_t i = 0; i < samples.size(); ++i) {
            const Sample& s = samples[i];
            std::snprintf(name, sizeof name, "%s_%04zu.tcir1", s.storm_id.c_str(), i);
            write_tcir1_file(out / "samples" / name, static_cast<std::uint32_t>(s.image.side),
                             static_cast<std::uint32_t>(s.image.side), s.image.temps.data());
            json entry;
            entry["storm_id"] = s.storm_id;
            entry["time"] = format_iso8601(s.time);
            entry["vmax"] = s.vmax;
            entry["file"] = name;
            entry["center_lat"] = s.image.center_lat;
            entry["center_lon"] = s.image.center_lon;
            manifest["samples"].push_back(std::move(entry));
        }
    }
    manifest["summary"]["emitted"] = totals.emitted;
    manifest["summary"]["skipped_no_frame"] = totals.skipped_no_frame;
    manifest["summary"]["skipped_no_vmax"] = totals.skipped_no_vmax;
    manifest["summary"]["storms_without_track"] = storms_without_track;
    manifest["summary"]["rejected_tracks"] = tracks.rejected.size();
    write_file_atomic(out / "samples" / "manifest.json", manifest.dump(2) + "\n");

    json notes = manifest["summary"];
    write_notes(out, "ingest", notes);
}

void stage_extract(const RunConfig& config, const fs::path& out) {
    const SamplesIndex samples = load_samples_index(out);
    OrbRows rows;
    const OrbLayout layout = orb_layout(config.orb);
    rows.d = layout.d;
    std::vector<Eigen::VectorXd> vectors;
    int rejected = 0;
    json reject_log = json::array();

    for (const SampleMeta& meta : samples.entries) {
        const CenteredImage img = load_sample_image(out, samples, meta);
        try {
            OrbVector vec = assemble_orb_vector(img, config.orb);
            vectors.push_back(std::move(vec.values));
            rows.storm_id.push_back(meta.storm_id);
            rows.time.push_back(meta.time);
        } catch (const DataError& e) {
            ++rejected;
            json r;
            r["storm_id"] = meta.storm_id;
            r["time"] = format_iso8601(meta.time);
            r["reason"] = e.what();
            reject_log.push_back(std::move(r));
        }
    }
    rows.X.resize(vectors.size(), rows.d);
    for (std::size_t i = 0; i < vectors.size(); ++i) rows.X.row(i) = vectors[i];
    save_orb_csv(out, rows);

    json layout_doc;
    layout_doc["d"] = layout.d;
    layout_doc["components"] = json::array();
    for (const OrbComponent& comp : layout.components) {
        json c;
        c["name"] = comp.name;
        c["abscissa"] = comp.abscissa == Abscissa::RadiusKm ? "radius_km" : "threshold_k";
        c["offset"] = comp.offset;
        c["length"] = comp.length;
        layout_doc["components"].push_back(std::move(c));
    }
    layout_doc["r_centers_km"] = config.orb.r_centers();
    layout_doc["thresholds_k"] = config.orb.thresholds();
    write_file_atomic(out / "orb_layout.json", layout_doc.dump(2) + "\n");

    json notes;
    notes["rows"] = rows.X.rows();
    notes["rejected"] = rejected;
    notes["rejects"] = reject_log;
    write_notes(out, "extract", notes);
}

namespace {

void fit_pca_stage(const RunConfig& config, const fs::path& out) {
    const OrbRows rows = load_orb_csv(out);
    std::vector<Eigen::Index> train_rows;
    for (Eigen::Index i = 0; i < rows.X.rows(); ++i)
        if (storm_split(config, rows.storm_id[i]) == Split::Train) train_rows.push_back(i);
    if (train_rows.size() < 2)
        throw DataError("fit pca: training split has " + std::to_string(train_rows.size()) +
                        " rows");
    Eigen::MatrixXd X(train_rows.size(), rows.d);
    for (std::size_t i = 0; i < train_rows.size(); ++i) X.row(i) = rows.X.row(train_rows[i]);

    const RankRule rule = config.pca_rule == "fixed" ? RankRule::fixed(config.pca_k)
                                                     : RankRule::variance(config.pca_fraction);
    const PcBasis basis = fit_pca(X, rule);
    fs::create_directories(out / "models");
    save_pc_basis(basis, out / "models" / "pca");

    json notes;
    notes["n_train_rows"] = train_rows.size();
    notes["k"] = basis.k();
    notes["explained"] = basis.explained_fraction.size() > 0
                             ? basis.explained_fraction[basis.k() - 1]
                             : 0.0;
    write_notes(out, "fit_pca", notes);
}

void fit_var_stage(const RunConfig& config, const fs::path& out) {
    const OrbRows rows = load_orb_csv(out);
    const PcBasis basis = load_pc_basis(out / "models" / "pca");
    const std::int64_t cadence = cadence_secs(config);

    std::vector<Eigen::MatrixXd> train_seqs, val_seqs;
    for (const StormSeries& storm : group_by_storm(rows)) {
        const Split split = storm_split(config, storm.storm_id);
        if (split == Split::Test) continue;
        const Eigen::MatrixXd z = project_series(basis, rows, storm);
        for (const auto& [start, len] : contiguous_runs(storm.times, cadence)) {
            if (static_cast<int>(len) < config.var_order + 1) continue;
            const Eigen::MatrixXd seq = z.middleRows(start, len);
            (split == Split::Train ? train_seqs : val_seqs).push_back(seq);
        }
    }
    if (train_seqs.empty()) throw DataError("fit var: no training sequences long enough");

    auto one_step_rms = [&](const VarModel& model, const std::vector<Eigen::MatrixXd>& seqs) {
        double sq = 0.0;
        long n = 0;
        for (const Eigen::MatrixXd& seq : seqs) {
            for (Eigen::Index t = model.order; t < seq.rows(); ++t) {
                const Eigen::MatrixXd pred =
                    forecast_var(model, seq.topRows(t), 1);
                sq += (pred.row(0) - seq.row(t)).squaredNorm();
                n += seq.cols();
            }
        }
        return n > 0 ? std::sqrt(sq / static_cast<double>(n))
                     : std::numeric_limits<double>::quiet_NaN();
    };

    const std::vector<Eigen::MatrixXd>& score_seqs = val_seqs.empty() ? train_seqs : val_seqs;
    double best_lambda = config.var_lambda_grid.front();
    double best_rms = std::numeric_limits<double>::infinity();
    json scores = json::object();
    for (double lambda : config.var_lambda_grid) {
        const VarModel candidate = fit_var(train_seqs, config.var_order, lambda);
        const double rms = one_step_rms(candidate, score_seqs);
        scores[format_double(lambda)] = rms;
        if (rms < best_rms) {
            best_rms = rms;
            best_lambda = lambda;
        }
    }
    const VarModel model = fit_var(train_seqs, config.var_order, best_lambda);
    fs::create_directories(out / "models");
    save_var_model(model, out / "models" / "var_b");

    json notes;
    notes["chosen_lambda"] = best_lambda;
    notes["selection_rms"] = scores;
    notes["selected_on"] = val_seqs.empty() ? "train" : "validation";
    notes["n_train_sequences"] = train_seqs.size();
    write_notes(out, "fit_var", notes);
}

void fit_imagedyn_stage(const RunConfig& config, const fs::path& out) {
    const SamplesIndex samples = load_samples_index(out);
    const std::int64_t cadence = cadence_secs(config);

    // Group sample metadata by storm, keep training storms, split into runs.
    std::vector<std::pair<std::string, std::vector<const SampleMeta*>>> by_storm;
    std::map<std::string, std::size_t> pos;
    for (const SampleMeta& meta : samples.entries) {
        if (storm_split(config, meta.storm_id) != Split::Train) continue;
        auto it = pos.find(meta.storm_id);
        if (it == pos.end()) {
            pos[meta.storm_id] = by_storm.size();
            by_storm.push_back({meta.storm_id, {}});
            it = pos.find(meta.storm_id);
        }
        by_storm[it->second].second.push_back(&meta);
    }

    std::vector<std::vector<CenteredImage>> sequences;
    for (const auto& [storm_id, metas] : by_storm) {
        std::vector<UtcTime> times;
        for (const SampleMeta* m : metas) times.push_back(m->time);
        for (const auto& [start, len] : contiguous_runs(times, cadence)) {
            if (static_cast<int>(len) < config.image_var_order + 1) continue;
            std::vector<CenteredImage> seq;
            for (std::size_t i = start; i < start + len; ++i)
                seq.push_back(load_sample_image(out, samples, *metas[i]));
            sequences.push_back(std::move(seq));
        }
    }
    if (sequences.empty()) throw DataError("fit imagedyn: no training sequences long enough");

    const ImageDynamicsModel model = fit_image_dynamics(
        sequences, config.image_latent_rank, config.image_var_order, config.image_var_lambda);
    fs::create_directories(out / "models");
    save_image_dynamics(model, out / "models" / "imagedyn");

    json notes;
    notes["n_sequences"] = sequences.size();
    notes["latent_rank"] = model.image_basis.k();
    write_notes(out, "fit_imagedyn", notes);
}

void fit_gam_stage(const RunConfig& config, const fs::path& out) {
    const OrbRows rows = load_orb_csv(out);
    const PcBasis basis = load_pc_basis(out / "models" / "pca");
    const std::vector<StructuralForecast> forecasts =
        load_forecasts_csv(out / "forecasts" / "pathway_b.csv");
    const std::vector<CoeffSample> train =
        make_coeff_samples(config, out, rows, basis, Split::Train);

    fs::create_directories(out / "models");
    json notes;
    for (int h : config.horizons_hours) {
        const DesignMatrix design =
            build_design(train, forecasts, h, static_cast<int>(config.cadence_hours));
        Eigen::MatrixXd X;
        Eigen::VectorXd y;
        design.training_view(X, y);
        if (X.rows() < 20)
            throw DataError("fit gam: only " + std::to_string(X.rows()) +
                            " training rows at horizon " + std::to_string(h));
        const GamModel model = fit_gam(X, y, config.gam_knots, config.gam_penalty);
        save_gam_model(model, out / "models" / ("gam_h" + std::to_string(h) + ".json"));
        notes["horizon_" + std::to_string(h)]["n_rows"] = X.rows();
        notes["horizon_" + std::to_string(h)]["cycles"] = model.cycles;
        notes["horizon_" + std::to_string(h)]["skipped_no_forecast"] = design.skipped_no_forecast;
    }
    write_notes(out, "fit_gam", notes);
}

void fit_lasso_stage(const RunConfig& config, const fs::path& out) {
    const OrbRows rows = load_orb_csv(out);
    const PcBasis basis = load_pc_basis(out / "models" / "pca");
    const std::vector<StructuralForecast> forecasts =
        load_forecasts_csv(out / "forecasts" / "pathway_b.csv");
    const fs::path lib = library_dir(config, out);
    const Hurdat2Result tracks = parse_hurdat2_file((lib / "hurdat2.txt").string());
    std::map<std::string, const StormTrack*> track_by_id;
    for (const StormTrack& t : tracks.tracks) track_by_id[t.storm_id] = &t;

    const int ri_h = static_cast<int>(config.ri_window_hours);
    json notes;
    auto design_for = [&](Split split) {
        return build_design(make_coeff_samples(config, out, rows, basis, split), forecasts, ri_h,
                            static_cast<int>(config.cadence_hours));
    };
    const DesignMatrix train_design = design_for(Split::Train);

    auto labels_for = [&](const DesignMatrix& design, Eigen::MatrixXd& X, std::vector<bool>& y) {
        std::vector<Eigen::Index> keep;
        y.clear();
        for (Eigen::Index i = 0; i < design.X.rows(); ++i) {
            const auto track = track_by_id.find(design.keys[i].storm_id);
            if (track == track_by_id.end()) continue;
            const auto label =
                label_rapid_change(*track->second, design.keys[i].issue_time,
                                   config.ri_window_hours, config.ri_threshold_kt,
                                   config.ri_increase_only);
            if (!label) continue;
            keep.push_back(i);
            y.push_back(*label);
        }
        X.resize(keep.size(), design.X.cols());
        for (std::size_t i = 0; i < keep.size(); ++i) X.row(i) = design.X.row(keep[i]);
    };

    Eigen::MatrixXd X_train;
    std::vector<bool> y_train;
    labels_for(train_design, X_train, y_train);
    if (X_train.rows() == 0) {
        notes["skipped"] = "no labeled training rows at the RI window";
        write_notes(out, "fit_lasso", notes);
        return;
    }
    const long n_pos = std::count(y_train.begin(), y_train.end(), true);
    const bool single_class = n_pos == 0 || n_pos == static_cast<long>(y_train.size());

    Eigen::MatrixXd X_val;
    std::vector<bool> y_val;
    labels_for(design_for(Split::Validation), X_val, y_val);

    auto val_loss = [&](const LassoModel& model) {
        if (X_val.rows() == 0) return std::numeric_limits<double>::quiet_NaN();
        double loss = 0.0;
        for (Eigen::Index i = 0; i < X_val.rows(); ++i) {
            const double p = std::clamp(predict_ri(model, X_val.row(i)), 1e-12, 1.0 - 1e-12);
            loss += y_val[i] ? -std::log(p) : -std::log(1.0 - p);
        }
        return loss / static_cast<double>(X_val.rows());
    };

    double best_lambda = config.lasso_lambda_grid.front();
    LassoModel best_model;
    double best_loss = std::numeric_limits<double>::infinity();
    json scores = json::object();
    for (double lambda : config.lasso_lambda_grid) {
        const LassoModel candidate = fit_logistic_lasso(X_train, y_train, lambda, single_class);
        double loss = val_loss(candidate);
        if (std::isnan(loss)) loss = candidate.objective_history.back(); // no validation rows
        scores[format_double(lambda)] = loss;
        if (loss < best_loss) {
            best_loss = loss;
            best_lambda = lambda;
            best_model = candidate;
        }
    }
    save_lasso_model(best_model, out / "models" / "lasso.json");

    notes["chosen_lambda"] = best_lambda;
    notes["selection_loss"] = scores;
    notes["selected_on"] = X_val.rows() > 0 ? "validation" : "train";
    notes["n_train_rows"] = X_train.rows();
    notes["n_positive"] = n_pos;
    notes["single_class"] = single_class;
    notes["nonzero_weights"] = best_model.n_nonzero();
    write_notes(out, "fit_lasso", notes);
}

} // namespace

void stage_fit(const RunConfig& config, const fs::path& out, const std::string& what) {
    if (what == "pca")
        fit_pca_stage(config, out);
    else if (what == "var")
        fit_var_stage(config, out);
    else if (what == "imagedyn")
        fit_imagedyn_stage(config, out);
    else if (what == "gam")
        fit_gam_stage(config, out);
    else if (what == "lasso")
        fit_lasso_stage(config, out);
    else
        throw DataError("unknown fit target '" + what + "'");
}

void stage_forecast(const RunConfig& config, const fs::path& out, char pathway,
                    const std::vector<int>& horizons) {
    const std::int64_t cadence = cadence_secs(config);
    int max_steps = 0;
    for (int h : horizons) {
        const int steps = static_cast<int>((static_cast<std::int64_t>(h) * 3600) / cadence);
        max_steps = std::max(max_steps, steps);
    }

    fs::create_directories(out / "forecasts");
    std::vector<StructuralForecast> forecasts;
    json notes;
    notes["pathway"] = std::string(1, pathway);

    if (pathway == 'b' || pathway == 'p') {
        const OrbRows rows = load_orb_csv(out);
        const PcBasis basis = load_pc_basis(out / "models" / "pca");
        VarModel model;
        if (pathway == 'b') model = load_var_model(out / "models" / "var_b");

        int skipped_short_history = 0;
        for (const StormSeries& storm : group_by_storm(rows)) {
            const Eigen::MatrixXd z = project_series(basis, rows, storm);
            for (const auto& [start, len] : contiguous_runs(storm.times, cadence)) {
                for (std::size_t i = start; i < start + len; ++i) {
                    const std::size_t history_len = i - start + 1;
                    if (pathway == 'b' && static_cast<int>(history_len) < model.order) {
                        ++skipped_short_history;
                        continue;
                    }
                    Eigen::MatrixXd fc;
                    if (pathway == 'b')
                        fc = forecast_var(model, z.middleRows(start, history_len), max_steps);
                    for (int h : horizons) {
                        const int step =
                            static_cast<int>((static_cast<std::int64_t>(h) * 3600) / cadence);
                        StructuralForecast f;
                        f.storm_id = storm.storm_id;
                        f.issue_time = storm.times[i];
                        f.horizon_hours = h;
                        if (pathway == 'b') {
                            f.pathway = 'B';
                            f.z_hat = fc.row(step - 1);
                            f.x_hat = pca_reconstruct(basis, f.z_hat);
                        } else {
                            f.pathway = 'P';
                            f.x_hat = rows.X.row(storm.row_index[i]);
                            f.z_hat = z.row(i);
                        }
                        forecasts.push_back(std::move(f));
                    }
                }
            }
        }
        notes["skipped_short_history"] = skipped_short_history;
    } else if (pathway == 'a') {
        const SamplesIndex samples = load_samples_index(out);
        const PcBasis orb_basis = load_pc_basis(out / "models" / "pca");
        const ImageDynamicsModel model = load_image_dynamics(out / "models" / "imagedyn");

        std::vector<std::pair<std::string, std::vector<const SampleMeta*>>> by_storm;
        std::map<std::string, std::size_t> pos;
        for (const SampleMeta& meta : samples.entries) {
            auto it = pos.find(meta.storm_id);
            if (it == pos.end()) {
                pos[meta.storm_id] = by_storm.size();
                by_storm.push_back({meta.storm_id, {}});
                it = pos.find(meta.storm_id);
            }
            by_storm[it->second].second.push_back(&meta);
        }

        int skipped_short_history = 0;
        int rejected_orb = 0;
        for (const auto& [storm_id, metas] : by_storm) {
            std::vector<UtcTime> times;
            for (const SampleMeta* m : metas) times.push_back(m->time);
            for (const auto& [start, len] : contiguous_runs(times, cadence)) {
                // Project the whole run once; per issue time only the latent
                // recursion and the forecast-frame reconstruction remain.
                Eigen::MatrixXd latent(len, model.image_basis.k());
                CenteredImage proto;
                for (std::size_t i = 0; i < len; ++i) {
                    const CenteredImage img = load_sample_image(out, samples, *metas[start + i]);
                    latent.row(i) = pca_project(model.image_basis, flatten_image(img));
                    if (i + 1 == len) proto = img;
                }
                for (std::size_t i = 0; i < len; ++i) {
                    if (static_cast<int>(i + 1) < model.dynamics.order) {
                        ++skipped_short_history;
                        continue;
                    }
                    const Eigen::MatrixXd z_fc =
                        forecast_var(model.dynamics, latent.topRows(i + 1), max_steps);
                    for (int h : horizons) {
                        const int step =
                            static_cast<int>((static_cast<std::int64_t>(h) * 3600) / cadence);
                        const Eigen::VectorXd pix =
                            pca_reconstruct(model.image_basis, z_fc.row(step - 1));
                        CenteredImage frame = proto;
                        for (std::size_t p = 0; p < frame.temps.size(); ++p)
                            frame.temps[p] =
                                std::clamp(static_cast<float>(pix[p]), kMinTempK, kMaxTempK);
                        StructuralForecast f;
                        f.storm_id = storm_id;
                        f.issue_time = times[start + i];
                        f.horizon_hours = h;
                        f.pathway = 'A';
                        try {
                            f.x_hat = assemble_orb_vector(frame, config.orb).values;
                        } catch (const DataError&) {
                            ++rejected_orb;
                            continue;
                        }
                        f.z_hat = pca_project(orb_basis, f.x_hat);
                        forecasts.push_back(std::move(f));
                    }
                }
            }
        }
        notes["skipped_short_history"] = skipped_short_history;
        notes["rejected_orb"] = rejected_orb;
    } else {
        throw DataError(std::string("unknown pathway '") + pathway + "'");
    }

    const char* file = pathway == 'a'   ? "pathway_a.csv"
                       : pathway == 'b' ? "pathway_b.csv"
                                        : "persistence.csv";
    save_forecasts_csv(forecasts, out / "forecasts" / file);
    notes["n_forecasts"] = forecasts.size();
    write_notes(out, std::string("forecast_") + pathway, notes);
}

void stage_evaluate(const RunConfig& config, const fs::path& out) {
    const OrbRows rows = load_orb_csv(out);
    const PcBasis basis = load_pc_basis(out / "models" / "pca");
    const std::vector<StructuralForecast> forecasts_b =
        load_forecasts_csv(out / "forecasts" / "pathway_b.csv");
    std::vector<StructuralForecast> forecasts_a;
    if (config.pathway_a_enabled && fs::exists(out / "forecasts" / "pathway_a.csv"))
        forecasts_a = load_forecasts_csv(out / "forecasts" / "pathway_a.csv");

    const std::vector<CoeffSample> test = make_coeff_samples(config, out, rows, basis, Split::Test);

    // RI probabilities at the configured window, when a lasso model exists.
    std::map<std::pair<std::string, std::int64_t>, double> ri_by_key;
    const int ri_h = static_cast<int>(config.ri_window_hours);
    if (fs::exists(out / "models" / "lasso.json")) {
        const LassoModel lasso = load_lasso_model(out / "models" / "lasso.json");
        const DesignMatrix ri_design =
            build_design(test, forecasts_b, ri_h, static_cast<int>(config.cadence_hours));
        for (Eigen::Index i = 0; i < ri_design.X.rows(); ++i)
            ri_by_key[{ri_design.keys[i].storm_id, ri_design.keys[i].issue_time.secs}] =
                predict_ri(lasso, ri_design.X.row(i));
    }

    std::vector<IntensityPrediction> predictions;
    std::vector<IntensityTruth> truths;
    std::ostringstream pred_csv;
    pred_csv << "storm_id,issue_time,horizon_hours,v_now_kt,v_hat_kt,p_ri\n";

    for (int h : config.horizons_hours) {
        const GamModel gam = load_gam_model(out / "models" / ("gam_h" + std::to_string(h) + ".json"));
        const DesignMatrix design =
            build_design(test, forecasts_b, h, static_cast<int>(config.cadence_hours));
        for (Eigen::Index i = 0; i < design.X.rows(); ++i) {
            const DesignKey& key = design.keys[i];
            const double v_now = design.X(i, 0);
            const double v_hat = predict_intensity(gam, design.X.row(i));
            predictions.push_back({key.storm_id, key.issue_time, h, "gam", v_hat});
            predictions.push_back({key.storm_id, key.issue_time, h, "persistence", v_now});
            if (design.has_target[i])
                truths.push_back({key.storm_id, key.issue_time, h, v_now + design.y[i]});

            pred_csv << key.storm_id << ',' << format_iso8601(key.issue_time) << ',' << h << ','
                     << format_double(v_now) << ',' << format_double(v_hat) << ',';
            const auto ri = ri_by_key.find({key.storm_id, key.issue_time.secs});
            if (h == ri_h && ri != ri_by_key.end()) pred_csv << format_double(ri->second);
            pred_csv << "\n";
        }
    }

    fs::create_directories(out / "reports");
    write_file_atomic(out / "reports" / "predictions.csv", pred_csv.str());

    const MetricsReport report = intensity_metrics(predictions, truths);
    save_metrics_csv(report, out / "reports" / "metrics_intensity.csv");

    // Structural comparison over test storms.
    std::map<std::pair<std::string, std::int64_t>, Eigen::VectorXd> truth_by_time;
    for (Eigen::Index i = 0; i < rows.X.rows(); ++i)
        if (storm_split(config, rows.storm_id[i]) == Split::Test)
            truth_by_time[{rows.storm_id[i], rows.time[i].secs}] = rows.X.row(i);
    auto test_only = [&](const std::vector<StructuralForecast>& all) {
        std::vector<StructuralForecast> kept;
        for (const StructuralForecast& f : all)
            if (storm_split(config, f.storm_id) == Split::Test) kept.push_back(f);
        return kept;
    };
    const std::vector<StructuralRow> structural =
        structural_metrics(test_only(forecasts_a), test_only(forecasts_b), truth_by_time, basis);
    save_structural_csv(structural, out / "reports" / "metrics_structural.csv");

    if (config.plots) {
        fs::create_directories(out / "plots");
        const OrbLayout layout = orb_layout(config.orb);
        // Structural profile of the first test sample.
        for (Eigen::Index i = 0; i < rows.X.rows(); ++i) {
            if (storm_split(config, rows.storm_id[i]) != Split::Test) continue;
            for (const OrbComponent& comp : layout.components) {
                const std::vector<double> grid = comp.abscissa == Abscissa::RadiusKm
                                                     ? config.orb.r_centers()
                                                     : config.orb.thresholds();
                SvgSeries series;
                series.name = comp.name;
                series.xs = grid;
                series.ys.assign(rows.X.row(i).data() + comp.offset,
                                 rows.X.row(i).data() + comp.offset + comp.length);
                write_svg_line_plot(out / "plots" / ("orb_" + comp.name + ".svg"),
                                    comp.name + " (" + rows.storm_id[i] + " " +
                                        format_iso8601(rows.time[i]) + ")",
                                    {series},
                                    comp.abscissa == Abscissa::RadiusKm ? "radius km"
                                                                        : "threshold K",
                                    comp.name == "levelset_area" ? "fraction" : "K");
            }
            break;
        }
        // Forecast-vs-observed intensity traces for the first test storms.
        std::map<std::pair<std::string, std::int64_t>, double> v_hat_24;
        for (const IntensityPrediction& p : predictions)
            if (p.model == "gam" && p.horizon_hours == ri_h)
                v_hat_24[{p.storm_id, p.issue_time.secs}] = p.v_hat;
        const SamplesIndex samples = load_samples_index(out);
        std::set<std::string> plotted;
        for (const SampleMeta& meta : samples.entries) {
            if (storm_split(config, meta.storm_id) != Split::Test) continue;
            if (plotted.count(meta.storm_id) || plotted.size() >= 3) continue;
            plotted.insert(meta.storm_id);
            SvgSeries observed{"observed", {}, {}};
            SvgSeries forecast{"gam +" + std::to_string(ri_h) + "h", {}, {}};
            const double t0 = static_cast<double>(meta.time.secs);
            for (const SampleMeta& m : samples.entries) {
                if (m.storm_id != meta.storm_id) continue;
                const double hours = (m.time.secs - t0) / 3600.0;
                observed.xs.push_back(hours);
                observed.ys.push_back(m.vmax);
                const auto hat = v_hat_24.find({m.storm_id, m.time.secs});
                if (hat != v_hat_24.end()) {
                    forecast.xs.push_back(hours + ri_h);
                    forecast.ys.push_back(hat->second);
                }
            }
            write_svg_line_plot(out / "plots" / ("intensity_" + meta.storm_id + ".svg"),
                                "intensity forecast vs observed: " + meta.storm_id,
                                {observed, forecast}, "hours since first sample", "kt");
        }
    }

    json notes;
    notes["n_predictions"] = predictions.size();
    notes["n_truths"] = truths.size();
    notes["unmatched_predictions"] = report.unmatched_predictions;
    write_notes(out, "evaluate", notes);
}

void stage_cluster(const RunConfig& config, const fs::path& out) {
    const OrbRows rows = load_orb_csv(out);
    const PcBasis basis = load_pc_basis(out / "models" / "pca");
    const std::vector<TrajWindow> windows = split_windows(config, rows, basis, Split::Train);
    if (windows.empty()) throw DataError("cluster: no training windows");

    const Eigen::Index n = static_cast<Eigen::Index>(windows.size());
    Eigen::MatrixXd distances(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        distances(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double d = trajectory_distance(windows[i].coeffs, windows[j].coeffs);
            distances(i, j) = d;
            distances(j, i) = d;
        }
    }
    const ClusterResult result = spectral_cluster(distances, config.cluster_k, config.seed);

    fs::create_directories(out / "reports");
    std::ostringstream csv;
    csv << "storm_id,window_start,label\n";
    for (Eigen::Index i = 0; i < n; ++i)
        csv << windows[i].storm_id << ',' << format_iso8601(windows[i].start) << ','
            << result.labels[i] << "\n";
    write_file_atomic(out / "reports" / "clusters.csv", csv.str());

    std::vector<float> emb(static_cast<std::size_t>(n) * config.cluster_k);
    for (Eigen::Index i = 0; i < n; ++i)
        for (int j = 0; j < config.cluster_k; ++j)
            emb[static_cast<std::size_t>(i) * config.cluster_k + j] =
                static_cast<float>(result.embedding(i, j));
    write_tcir1_file(out / "reports" / "cluster_embedding.bin",
                     static_cast<std::uint32_t>(config.cluster_k), static_cast<std::uint32_t>(n),
                     emb.data());

    json notes;
    notes["n_windows"] = windows.size();
    notes["sigma"] = result.sigma;
    notes["k_clusters"] = config.cluster_k;
    write_notes(out, "cluster", notes);
}

void stage_analogs(const RunConfig& config, const fs::path& out) {
    const OrbRows rows = load_orb_csv(out);
    const PcBasis basis = load_pc_basis(out / "models" / "pca");
    const std::vector<TrajWindow> library = split_windows(config, rows, basis, Split::Train);
    if (library.empty()) throw DataError("analogs: no library windows");

    std::ostringstream csv;
    csv << "query_storm_id,query_window_start,rank,analog_storm_id,analog_window_start,"
           "distance_std\n";
    int n_queries = 0;
    for (const StormSeries& storm : group_by_storm(rows)) {
        if (storm_split(config, storm.storm_id) != Split::Test) continue;
        const Eigen::MatrixXd z = project_series(basis, rows, storm);
        const auto windows =
            extract_windows(storm.storm_id, storm.times, z, config.window_len,
                            static_cast<int>(config.cadence_hours), 1);
        if (windows.empty()) continue;
        const TrajWindow& query = windows.back();
        const auto matches = find_analogs(query, library, config.analog_top_m);
        for (std::size_t rank = 0; rank < matches.size(); ++rank)
            csv << query.storm_id << ',' << format_iso8601(query.start) << ',' << rank + 1 << ','
                << matches[rank].storm_id << ',' << format_iso8601(matches[rank].window_start)
                << ',' << format_double(matches[rank].distance) << "\n";
        ++n_queries;
    }
    fs::create_directories(out / "reports");
    write_file_atomic(out / "reports" / "analogs.csv", csv.str());

    json notes;
    notes["n_queries"] = n_queries;
    notes["library_windows"] = library.size();
    write_notes(out, "analogs", notes);
}

void run_pipeline(const RunConfig& config, const fs::path& out) {
    fs::create_directories(out);
    const fs::path done = out / "DONE";
    std::error_code ec;
    fs::remove(done, ec); // a stale sentinel must not survive a failed rerun

    struct Step {
        const char* name;
        std::function<void()> fn;
    };
    std::vector<Step> steps;
    if (config.synthetic_input)
        steps.push_back({"synth", [&] { stage_synth(config, out); }});
    steps.push_back({"ingest", [&] { stage_ingest(config, out); }});
    steps.push_back({"extract", [&] { stage_extract(config, out); }});
    steps.push_back({"fit pca", [&] { stage_fit(config, out, "pca"); }});
    steps.push_back({"fit var", [&] { stage_fit(config, out, "var"); }});
    if (config.pathway_a_enabled)
        steps.push_back({"fit imagedyn", [&] { stage_fit(config, out, "imagedyn"); }});
    steps.push_back(
        {"forecast b", [&] { stage_forecast(config, out, 'b', config.horizons_hours); }});
    if (config.pathway_a_enabled)
        steps.push_back(
            {"forecast a", [&] { stage_forecast(config, out, 'a', config.horizons_hours); }});
    steps.push_back(
        {"forecast persistence", [&] { stage_forecast(config, out, 'p', config.horizons_hours); }});
    steps.push_back({"fit gam", [&] { stage_fit(config, out, "gam"); }});
    steps.push_back({"fit lasso", [&] { stage_fit(config, out, "lasso"); }});
    steps.push_back({"evaluate", [&] { stage_evaluate(config, out); }});
    steps.push_back({"cluster", [&] { stage_cluster(config, out); }});
    steps.push_back({"analogs", [&] { stage_analogs(config, out); }});

    std::vector<std::string> completed;
    for (const Step& step : steps) {
        try {
            step.fn();
        } catch (const std::exception& e) {
            throw Error("pipeline stage '" + std::string(step.name) + "' failed: " + e.what());
        }
        completed.push_back(step.name);
    }

    json manifest;
    manifest["version"] = kVersion;
    manifest["seed"] = config.seed;
    manifest["config_hash"] = run_config_hash(config);
    manifest["config"] = json::parse(run_config_to_json(config));
    manifest["stages"] = completed;
    write_file_atomic(out / "run_manifest.json", manifest.dump(2) + "\n");
    write_file_atomic(done, "ok\n");
}

} // namespace tcs

#include "tcstruct/analogs.hpp"
#include "tcstruct/config.hpp"
#include "tcstruct/design.hpp"
#include "tcstruct/error.hpp"
#include "tcstruct/forecast.hpp"
#include "tcstruct/gam.hpp"
#include "tcstruct/hurdat2.hpp"
#include "tcstruct/image_dynamics.hpp"
#include "tcstruct/lasso.hpp"
#include "tcstruct/metrics.hpp"
#include "tcstruct/orb.hpp"
#include "tcstruct/pca.hpp"
#include "tcstruct/pipeline.hpp"
#include "tcstruct/regrid.hpp"
#include "tcstruct/samples.hpp"
#include "tcstruct/stack.hpp"
#include "tcstruct/synth.hpp"
#include "tcstruct/var.hpp"

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace tcs;

namespace {

py::array_t<float> image_array(const CenteredImage& img) {
    py::array_t<float> arr({img.side, img.side});
    std::copy(img.temps.begin(), img.temps.end(), arr.mutable_data());
    return arr;
}

void set_image_array(CenteredImage& img, py::array_t<float, py::array::c_style> arr) {
    if (arr.ndim() != 2 || arr.shape(0) != img.side || arr.shape(1) != img.side)
        throw DataError("temps must be a (side, side) float32 array");
    std::copy(arr.data(), arr.data() + img.temps.size(), img.temps.begin());
}

py::array_t<float> frame_array(const IrFrame& frame) {
    py::array_t<float> arr({frame.height, frame.width});
    std::copy(frame.temps.begin(), frame.temps.end(), arr.mutable_data());
    return arr;
}

} // namespace

PYBIND11_MODULE(_tcstruct, m) {
    m.doc() = "Tropical-cyclone structural forecasting: ORB extraction, latent dynamics, "
              "intensity models, analogs, and the batch pipeline.";

    // Translators run newest-first, so the base class goes first and the
    // derived classes shadow it.
    py::register_exception<Error>(m, "TcstructError", PyExc_RuntimeError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);

    // --- time ---
    py::class_<UtcTime>(m, "UtcTime")
        .def(py::init([](const std::string& iso) { return parse_iso8601(iso); }))
        .def(py::init([](std::int64_t secs) { return UtcTime{secs}; }))
        .def_readwrite("secs", &UtcTime::secs)
        .def("iso", &format_iso8601)
        .def("__repr__", [](UtcTime t) { return "UtcTime('" + format_iso8601(t) + "')"; })
        .def(py::self == py::self)
        .def(py::self < py::self);

    // --- grids and images ---
    py::class_<GridGeom>(m, "GridGeom")
        .def(py::init<>())
        .def(py::init([](double half_width_km, double step_km) {
                 return GridGeom{half_width_km, step_km};
             }),
             py::arg("half_width_km"), py::arg("step_km"))
        .def_readwrite("half_width_km", &GridGeom::half_width_km)
        .def_readwrite("step_km", &GridGeom::step_km)
        .def("side", &GridGeom::side);

    py::class_<CenteredImage>(m, "CenteredImage")
        .def_readonly("center_lat", &CenteredImage::center_lat)
        .def_readonly("center_lon", &CenteredImage::center_lon)
        .def_readonly("half_width_km", &CenteredImage::half_width_km)
        .def_readonly("step_km", &CenteredImage::step_km)
        .def_readonly("valid_time", &CenteredImage::valid_time)
        .def_readonly("side", &CenteredImage::side)
        .def_property("temps", &image_array, &set_image_array,
                      "(side, side) float32 brightness temperatures; NaN marks missing")
        .def("missing_count", &CenteredImage::missing_count);
    m.def(
        "make_centered_image",
        [](const GridGeom& geom, double lat, double lon, UtcTime t) {
            return make_centered_image(geom, lat, lon, t);
        },
        py::arg("geom"), py::arg("center_lat") = 0.0, py::arg("center_lon") = 0.0,
        py::arg("valid_time") = UtcTime{});

    py::class_<IrFrame>(m, "IrFrame")
        .def_readonly("valid_time", &IrFrame::valid_time)
        .def_readonly("channel", &IrFrame::channel)
        .def_readonly("origin_lat", &IrFrame::origin_lat)
        .def_readonly("origin_lon", &IrFrame::origin_lon)
        .def_readonly("step_deg", &IrFrame::step_deg)
        .def_readonly("width", &IrFrame::width)
        .def_readonly("height", &IrFrame::height)
        .def_property_readonly("temps", &frame_array);

    // --- tracks ---
    py::class_<TrackFix>(m, "TrackFix")
        .def(py::init<>())
        .def_readwrite("time", &TrackFix::time)
        .def_readwrite("record_id", &TrackFix::record_id)
        .def_readwrite("status", &TrackFix::status)
        .def_readwrite("lat", &TrackFix::lat)
        .def_readwrite("lon", &TrackFix::lon)
        .def_readwrite("vmax", &TrackFix::vmax)
        .def_readwrite("pmin", &TrackFix::pmin);
    py::class_<StormTrack>(m, "StormTrack")
        .def(py::init<>())
        .def_readwrite("storm_id", &StormTrack::storm_id)
        .def_readwrite("name", &StormTrack::name)
        .def_readwrite("fixes", &StormTrack::fixes);
    py::class_<Hurdat2Reject>(m, "Hurdat2Reject")
        .def_readonly("storm_id", &Hurdat2Reject::storm_id)
        .def_readonly("line", &Hurdat2Reject::line)
        .def_readonly("reason", &Hurdat2Reject::reason);
    py::class_<Hurdat2Result>(m, "Hurdat2Result")
        .def_readonly("tracks", &Hurdat2Result::tracks)
        .def_readonly("rejected", &Hurdat2Result::rejected);
    py::class_<LatLon>(m, "LatLon")
        .def_readonly("lat", &LatLon::lat)
        .def_readonly("lon", &LatLon::lon);

    m.def("parse_hurdat2", &parse_hurdat2_text, py::arg("text"));
    m.def("parse_hurdat2_file", &parse_hurdat2_file, py::arg("path"));
    m.def("format_hurdat2", &format_hurdat2, py::arg("tracks"));
    m.def("interpolate_center", &interpolate_center, py::arg("track"), py::arg("time"));

    // --- stacks and samples ---
    m.def("read_ir_stack", &read_ir_stack, py::arg("manifest_path"));
    m.def("regrid_to_storm",
          [](const IrFrame& frame, double lat, double lon, const GridGeom& geom) {
              return regrid_to_storm(frame, {lat, lon}, geom);
          },
          py::arg("frame"), py::arg("center_lat"), py::arg("center_lon"), py::arg("geom"));

    py::class_<Sample>(m, "Sample")
        .def_readonly("storm_id", &Sample::storm_id)
        .def_readonly("time", &Sample::time)
        .def_readonly("image", &Sample::image)
        .def_readonly("vmax", &Sample::vmax);
    py::class_<SampleBuildSummary>(m, "SampleBuildSummary")
        .def_readonly("emitted", &SampleBuildSummary::emitted)
        .def_readonly("skipped_no_frame", &SampleBuildSummary::skipped_no_frame)
        .def_readonly("skipped_no_vmax", &SampleBuildSummary::skipped_no_vmax);
    m.def(
        "build_samples",
        [](const std::vector<IrFrame>& frames, const StormTrack& track, double cadence_hours,
           double tolerance_minutes, const GridGeom& geom) {
            SampleBuildOptions options{cadence_hours, tolerance_minutes, geom};
            SampleBuildSummary summary;
            auto samples = build_samples(frames, track, options, &summary);
            return py::make_tuple(std::move(samples), summary);
        },
        py::arg("frames"), py::arg("track"), py::arg("cadence_hours") = 6.0,
        py::arg("tolerance_minutes") = 90.0, py::arg("geom") = GridGeom{});

    // --- ORB ---
    py::enum_<Abscissa>(m, "Abscissa")
        .value("RADIUS_KM", Abscissa::RadiusKm)
        .value("THRESHOLD_K", Abscissa::ThresholdK);
    py::enum_<RadialStat>(m, "RadialStat")
        .value("MEAN", RadialStat::Mean)
        .value("STDEV", RadialStat::Stdev);
    py::class_<OrbConfig>(m, "OrbConfig")
        .def(py::init<>())
        .def_readwrite("r_max_km", &OrbConfig::r_max_km)
        .def_readwrite("r_step_km", &OrbConfig::r_step_km)
        .def_readwrite("c_min_k", &OrbConfig::c_min_k)
        .def_readwrite("c_max_k", &OrbConfig::c_max_k)
        .def_readwrite("c_step_k", &OrbConfig::c_step_k)
        .def_readwrite("asym_wavenumbers", &OrbConfig::asym_wavenumbers)
        .def_readwrite("max_missing_fraction", &OrbConfig::max_missing_fraction)
        .def("n_annuli", &OrbConfig::n_annuli)
        .def("n_thresholds", &OrbConfig::n_thresholds)
        .def("r_centers", &OrbConfig::r_centers)
        .def("thresholds", &OrbConfig::thresholds);
    py::class_<OrbFunction>(m, "OrbFunction")
        .def_readonly("abscissa", &OrbFunction::abscissa)
        .def_property_readonly("grid",
                               [](const OrbFunction& f) {
                                   return py::array_t<double>(f.grid.size(), f.grid.data());
                               })
        .def_property_readonly("values", [](const OrbFunction& f) {
            return py::array_t<double>(f.values.size(), f.values.data());
        });
    py::class_<OrbComponent>(m, "OrbComponent")
        .def_readonly("name", &OrbComponent::name)
        .def_readonly("abscissa", &OrbComponent::abscissa)
        .def_readonly("offset", &OrbComponent::offset)
        .def_readonly("length", &OrbComponent::length);
    py::class_<OrbLayout>(m, "OrbLayout")
        .def_readonly("components", &OrbLayout::components)
        .def_readonly("d", &OrbLayout::d);
    py::class_<OrbVector>(m, "OrbVector")
        .def_readonly("values", &OrbVector::values)
        .def_readonly("layout", &OrbVector::layout);

    m.def("radial_profile", &radial_profile, py::arg("image"), py::arg("stat"),
          py::arg("config") = OrbConfig{});
    m.def("asymmetry_profile", &asymmetry_profile, py::arg("image"), py::arg("wavenumber") = 1,
          py::arg("config") = OrbConfig{});
    m.def("levelset_area", &levelset_area, py::arg("image"), py::arg("config") = OrbConfig{});
    m.def("assemble_orb_vector", &assemble_orb_vector, py::arg("image"),
          py::arg("config") = OrbConfig{});
    m.def("orb_layout", &orb_layout, py::arg("config") = OrbConfig{});

    // --- latent space ---
    py::class_<PcBasis>(m, "PcBasis")
        .def_readonly("mean", &PcBasis::mean)
        .def_readonly("scale", &PcBasis::scale)
        .def_readonly("components", &PcBasis::components)
        .def_readonly("singular_values", &PcBasis::singular_values)
        .def_readonly("explained_fraction", &PcBasis::explained_fraction)
        .def("d", &PcBasis::d)
        .def("k", &PcBasis::k);
    m.def(
        "fit_pca",
        [](const Eigen::MatrixXd& X, double variance_fraction, int fixed_k) {
            return fit_pca(X, fixed_k > 0 ? RankRule::fixed(fixed_k)
                                          : RankRule::variance(variance_fraction));
        },
        py::arg("X"), py::arg("variance_fraction") = 0.95, py::arg("fixed_k") = 0);
    m.def("pca_project", &pca_project, py::arg("basis"), py::arg("x"));
    m.def("pca_reconstruct", &pca_reconstruct, py::arg("basis"), py::arg("z"));
    m.def("pca_project_rows", &pca_project_rows, py::arg("basis"), py::arg("X"));
    m.def("save_pc_basis", &save_pc_basis, py::arg("basis"), py::arg("stem"));
    m.def("load_pc_basis", &load_pc_basis, py::arg("stem"));

    // --- structural dynamics ---
    py::class_<VarModel>(m, "VarModel")
        .def_readonly("order", &VarModel::order)
        .def_readonly("coeffs", &VarModel::coeffs)
        .def_readonly("intercept", &VarModel::intercept)
        .def_readonly("ridge", &VarModel::ridge)
        .def_readonly("resid_var", &VarModel::resid_var)
        .def("dim", &VarModel::dim)
        .def("coeff_norm", &VarModel::coeff_norm);
    m.def("fit_var", &fit_var, py::arg("series"), py::arg("order"), py::arg("ridge") = 0.0);
    m.def("forecast_var", &forecast_var, py::arg("model"), py::arg("history"), py::arg("steps"));

    py::class_<ImageDynamicsModel>(m, "ImageDynamicsModel")
        .def_readonly("image_basis", &ImageDynamicsModel::image_basis)
        .def_readonly("dynamics", &ImageDynamicsModel::dynamics);
    m.def("fit_image_dynamics", &fit_image_dynamics, py::arg("sequences"),
          py::arg("latent_rank") = 64, py::arg("order") = 2, py::arg("ridge") = 0.1);
    m.def("forecast_images", &forecast_images, py::arg("model"), py::arg("history"),
          py::arg("steps"));
    m.def(
        "persistence_forecast",
        [](const std::vector<Eigen::VectorXd>& history, int steps) {
            return persistence_forecast(history, steps);
        },
        py::arg("history"), py::arg("steps"));

    py::class_<StructuralForecast>(m, "StructuralForecast")
        .def(py::init<>())
        .def_readwrite("storm_id", &StructuralForecast::storm_id)
        .def_readwrite("issue_time", &StructuralForecast::issue_time)
        .def_readwrite("horizon_hours", &StructuralForecast::horizon_hours)
        .def_readwrite("pathway", &StructuralForecast::pathway)
        .def_readwrite("z_hat", &StructuralForecast::z_hat)
        .def_readwrite("x_hat", &StructuralForecast::x_hat);

    // --- intensity models ---
    py::class_<GamSmoother>(m, "GamSmoother")
        .def_readonly("knots", &GamSmoother::knots)
        .def_readonly("coeffs", &GamSmoother::coeffs)
        .def("eval", &GamSmoother::eval);
    py::class_<GamModel>(m, "GamModel")
        .def_readonly("intercept", &GamModel::intercept)
        .def_readonly("smoothers", &GamModel::smoothers)
        .def_readonly("cycles", &GamModel::cycles)
        .def_readonly("fitted", &GamModel::fitted)
        .def_readonly("objective_history", &GamModel::objective_history)
        .def("predict_change", &GamModel::predict_change);
    m.def("fit_gam", &fit_gam, py::arg("X"), py::arg("y"), py::arg("knots_per_feature") = 10,
          py::arg("penalty") = 1.0);
    m.def("predict_intensity", &predict_intensity, py::arg("model"), py::arg("features"));

    py::class_<LassoModel>(m, "LassoModel")
        .def_readonly("weights", &LassoModel::weights)
        .def_readonly("intercept", &LassoModel::intercept)
        .def_readonly("lambda_", &LassoModel::lambda)
        .def_readonly("objective_history", &LassoModel::objective_history)
        .def("n_nonzero", &LassoModel::n_nonzero);
    m.def("fit_logistic_lasso", &fit_logistic_lasso, py::arg("X"), py::arg("labels"),
          py::arg("lambda_"), py::arg("allow_single_class") = false);
    m.def("lasso_lambda_max", &lasso_lambda_max, py::arg("X"), py::arg("labels"));
    m.def("predict_ri", &predict_ri, py::arg("model"), py::arg("features"));
    m.def("label_rapid_change", &label_rapid_change, py::arg("track"), py::arg("time"),
          py::arg("window_hours") = 24.0, py::arg("threshold_kt") = 30.0,
          py::arg("increase_only") = false);

    // --- analogs ---
    py::class_<TrajWindow>(m, "TrajWindow")
        .def(py::init<>())
        .def_readwrite("storm_id", &TrajWindow::storm_id)
        .def_readwrite("start", &TrajWindow::start)
        .def_readwrite("coeffs", &TrajWindow::coeffs);
    py::class_<ClusterResult>(m, "ClusterResult")
        .def_readonly("labels", &ClusterResult::labels)
        .def_readonly("embedding", &ClusterResult::embedding)
        .def_readonly("sigma", &ClusterResult::sigma)
        .def_readonly("seed", &ClusterResult::seed);
    py::class_<AnalogMatch>(m, "AnalogMatch")
        .def_readonly("storm_id", &AnalogMatch::storm_id)
        .def_readonly("window_start", &AnalogMatch::window_start)
        .def_readonly("distance", &AnalogMatch::distance);
    m.def("trajectory_distance", &trajectory_distance, py::arg("a"), py::arg("b"));
    m.def("extract_windows", &extract_windows, py::arg("storm_id"), py::arg("times"),
          py::arg("coeffs"), py::arg("window_len") = 5, py::arg("cadence_hours") = 6,
          py::arg("stride") = 1);
    m.def("spectral_cluster", &spectral_cluster, py::arg("distances"), py::arg("k_clusters"),
          py::arg("seed"));
    m.def("find_analogs", &find_analogs, py::arg("query"), py::arg("library"), py::arg("top_m"),
          py::arg("exclude_same_storm") = true);

    // --- synthetic data ---
    py::class_<SceneParams>(m, "SceneParams")
        .def(py::init<>())
        .def_readwrite("eye_radius_km", &SceneParams::eye_radius_km)
        .def_readwrite("eyewall_outer_radius_km", &SceneParams::eyewall_outer_radius_km)
        .def_readwrite("eye_temp_k", &SceneParams::eye_temp_k)
        .def_readwrite("eyewall_temp_k", &SceneParams::eyewall_temp_k)
        .def_readwrite("background_temp_k", &SceneParams::background_temp_k)
        .def_readwrite("asym_amp_k", &SceneParams::asym_amp_k)
        .def_readwrite("asym_phase_rad", &SceneParams::asym_phase_rad)
        .def_readwrite("noise_sd_k", &SceneParams::noise_sd_k)
        .def_readwrite("rng_seed", &SceneParams::rng_seed);
    py::class_<StormSimConfig>(m, "StormSimConfig")
        .def(py::init<>())
        .def_readwrite("steps", &StormSimConfig::steps)
        .def_readwrite("cadence_hours", &StormSimConfig::cadence_hours)
        .def_readwrite("depth_ar", &StormSimConfig::depth_ar)
        .def_readwrite("depth_noise_sd", &StormSimConfig::depth_noise_sd)
        .def_readwrite("gain_kt_per_k", &StormSimConfig::gain_kt_per_k)
        .def_readwrite("intensity_noise_sd", &StormSimConfig::intensity_noise_sd)
        .def_readwrite("initial_intensity_kt", &StormSimConfig::initial_intensity_kt)
        .def_readwrite("reference_depth_k", &StormSimConfig::reference_depth_k)
        .def_readwrite("regime", &StormSimConfig::regime)
        .def_readwrite("scene", &StormSimConfig::scene);
    py::class_<SimStep>(m, "SimStep")
        .def_readonly("image", &SimStep::image)
        .def_readonly("vmax", &SimStep::vmax)
        .def_readonly("depth", &SimStep::depth);
    py::class_<LibraryConfig>(m, "LibraryConfig")
        .def(py::init<>())
        .def_readwrite("n_storms", &LibraryConfig::n_storms)
        .def_readwrite("regimes", &LibraryConfig::regimes)
        .def_readwrite("geom", &LibraryConfig::geom)
        .def_readwrite("start_year", &LibraryConfig::start_year)
        .def_readwrite("seed", &LibraryConfig::seed);
    py::class_<LibraryStorm>(m, "LibraryStorm")
        .def_readonly("storm_id", &LibraryStorm::storm_id)
        .def_readonly("regime_index", &LibraryStorm::regime_index)
        .def_readonly("regime", &LibraryStorm::regime)
        .def_readonly("manifest", &LibraryStorm::manifest);
    py::class_<LibraryPaths>(m, "LibraryPaths")
        .def_readonly("root", &LibraryPaths::root)
        .def_readonly("hurdat2", &LibraryPaths::hurdat2)
        .def_readonly("storms", &LibraryPaths::storms);
    m.def("render_scene", &render_scene, py::arg("params"), py::arg("geom"),
          py::arg("center_lat") = 0.0, py::arg("center_lon") = 0.0,
          py::arg("valid_time") = UtcTime{});
    m.def("simulate_storm", &simulate_storm, py::arg("config"), py::arg("geom"), py::arg("seed"));
    m.def("default_regimes", &default_regimes);
    m.def("generate_library", &generate_library, py::arg("config"), py::arg("out_dir"));

    // --- metrics and pipeline ---
    m.def("standardized_l2", &standardized_l2, py::arg("a"), py::arg("b"), py::arg("basis"));
    m.def(
        "split_of",
        [](const std::string& storm_id, double train, double validation) -> std::string {
            switch (split_of(storm_id, train, validation)) {
                case Split::Train: return "train";
                case Split::Validation: return "validation";
                default: return "test";
            }
        },
        py::arg("storm_id"), py::arg("train_fraction") = 0.6,
        py::arg("validation_fraction") = 0.2);

    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init<>())
        .def_readwrite("synthetic_input", &RunConfig::synthetic_input)
        .def_readwrite("library_dir", &RunConfig::library_dir)
        .def_readwrite("synth_n_storms", &RunConfig::synth_n_storms)
        .def_readwrite("synth_steps", &RunConfig::synth_steps)
        .def_readwrite("grid", &RunConfig::grid)
        .def_readwrite("orb", &RunConfig::orb)
        .def_readwrite("pathway_a_enabled", &RunConfig::pathway_a_enabled)
        .def_readwrite("horizons_hours", &RunConfig::horizons_hours)
        .def_readwrite("plots", &RunConfig::plots)
        .def_readwrite("seed", &RunConfig::seed);
    m.def("load_run_config", &load_run_config, py::arg("path"));
    m.def("run_pipeline", &run_pipeline, py::arg("config"), py::arg("out_dir"));

    m.attr("__version__") = kVersion;
}

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cdsurf/code.hpp"
#include "cdsurf/decoder.hpp"
#include "cdsurf/experiments.hpp"
#include "cdsurf/fit.hpp"
#include "cdsurf/geometry.hpp"
#include "cdsurf/matching.hpp"
#include "cdsurf/noise.hpp"
#include "cdsurf/pauli.hpp"

namespace py = pybind11;
using namespace cdsurf;

namespace {

WeightMetric metric_from_name(const std::string& name, std::optional<double> p1,
                              std::optional<double> p2, std::optional<double> wx,
                              std::optional<double> wz) {
    if (name == "manhattan") return WeightMetric::manhattan();
    if (name == "weighted_manhattan") {
        if (!wx || !wz) throw std::invalid_argument("weighted_manhattan needs wx and wz");
        return WeightMetric::weighted_manhattan(*wx, *wz);
    }
    if (name == "dijkstra") return WeightMetric::dijkstra();
    if (name == "degeneracy" || name == "degeneracy_literal") {
        if (!p1) throw std::invalid_argument("degeneracy needs p1");
        return WeightMetric::degeneracy(*p1, name == "degeneracy_literal");
    }
    if (name == "degeneracy_correlation") {
        if (!p1 || !p2) throw std::invalid_argument("degeneracy_correlation needs p1 and p2");
        return WeightMetric::degeneracy_correlation(*p1, *p2);
    }
    throw std::invalid_argument("unknown metric '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Clifford-deformed surface code simulation core";

    py::enum_<Layout>(m, "Layout")
        .value("NON_ROTATED", Layout::NonRotated)
        .value("ROTATED", Layout::Rotated);

    py::enum_<Sublattice>(m, "Sublattice")
        .value("PRIMAL", Sublattice::Primal)
        .value("DUAL", Sublattice::Dual);

    py::class_<LatticeSpec>(m, "LatticeSpec")
        .def(py::init([](int d1, int d2, Layout layout) {
                 return LatticeSpec{d1, d2, layout};
             }),
             py::arg("d1"), py::arg("d2"), py::arg("layout") = Layout::NonRotated)
        .def_readonly("d1", &LatticeSpec::d1)
        .def_readonly("d2", &LatticeSpec::d2)
        .def_readonly("layout", &LatticeSpec::layout)
        .def("distance", &LatticeSpec::distance);

    py::class_<Lattice, std::shared_ptr<Lattice>>(m, "Lattice")
        .def_property_readonly("num_qubits", &Lattice::num_qubits)
        .def_property_readonly("num_stabilizers", &Lattice::num_stabilizers)
        .def("stabilizer_displacement",
             [](const Lattice& lat, int a, int b) {
                 const auto d = stabilizer_displacement(lat, a, b);
                 return std::make_pair(d.lx, d.lz);
             })
        .def("boundary_distance", [](const Lattice& lat, int s) {
            const auto d = boundary_distance(lat, s);
            return std::make_pair(d.lx, d.lz);
        });

    m.def(
        "build_lattice",
        [](const LatticeSpec& spec) { return std::const_pointer_cast<Lattice>(build_lattice(spec)); },
        py::arg("spec"));
    m.def("matched_rectangle", &matched_rectangle, py::arg("d"), py::arg("aspect"));

    py::class_<PauliOperator>(m, "PauliOperator")
        .def_static("from_string", &PauliOperator::from_string)
        .def_static("identity", &PauliOperator::identity)
        .def("__str__", &PauliOperator::to_string)
        .def("weight", &PauliOperator::weight)
        .def("commutes_with", &PauliOperator::commutes_with)
        .def("__mul__", [](const PauliOperator& a, const PauliOperator& b) { return a * b; })
        .def("__eq__", [](const PauliOperator& a, const PauliOperator& b) { return a == b; });

    py::class_<Syndrome>(m, "Syndrome")
        .def_property_readonly("bits", [](const Syndrome& s) { return s.bits; })
        .def("is_trivial", &Syndrome::is_trivial)
        .def("defect_count", &Syndrome::defect_count);

    py::class_<NoiseModel>(m, "NoiseModel")
        .def_property_readonly("num_qubits", &NoiseModel::num_qubits)
        .def("rates",
             [](const NoiseModel& n, int q) {
                 const auto& r = n.rates(q);
                 return std::make_tuple(r.x, r.y, r.z);
             })
        .def("mean_rate", &NoiseModel::mean_rate)
        .def("with_pair_channel", [](const NoiseModel& n, const std::string& kind, double p2, double pxx) {
            return n.with_pair_channel({kind == "xz" ? PairKind::XZ : PairKind::XX_ZZ, p2, pxx});
        }, py::arg("kind"), py::arg("p2"), py::arg("pxx") = 0.5);

    m.def(
        "make_iid",
        [](double p, std::size_t n, double rx, double ry, double rz) {
            return make_iid(p, {rx, ry, rz}, n);
        },
        py::arg("p"), py::arg("n"), py::arg("rx") = 1.0 / 3.0, py::arg("ry") = 1.0 / 3.0,
        py::arg("rz") = 1.0 / 3.0);
    m.def("make_toy_permutation", &make_toy_permutation, py::arg("l"), py::arg("m"), py::arg("h"),
          py::arg("n"), py::arg("seed"));
    m.def("make_gaussian", &make_gaussian, py::arg("p"), py::arg("sigma_p"), py::arg("sigma_tot"),
          py::arg("n"), py::arg("seed"));

    py::class_<CodeLayout>(m, "CodeLayout")
        .def_property_readonly("family", [](const CodeLayout& c) { return to_string(c.family()); })
        .def_property_readonly("num_qubits", [](const CodeLayout& c) { return c.lattice().num_qubits(); })
        .def("v_letter", [](const CodeLayout& c, int q) { return std::string(1, pauli_char(c.v_letter(q))); })
        .def("h_letter", [](const CodeLayout& c, int q) { return std::string(1, pauli_char(c.h_letter(q))); })
        .def("measured_letter",
             [](const CodeLayout& c, int s, int q) { return std::string(1, pauli_char(c.measured_letter(s, q))); })
        .def_property_readonly("xbar", [](const CodeLayout& c) { return c.logicals().xbar; })
        .def_property_readonly("zbar", [](const CodeLayout& c) { return c.logicals().zbar; })
        .def("to_json", [](const CodeLayout& c) { return c.to_json().dump(); })
        .def_static("from_json",
                    [](const std::string& text) { return CodeLayout::from_json(nlohmann::json::parse(text)); });

    m.def(
        "build_code",
        [](const std::string& family, std::shared_ptr<Lattice> lattice, const NoiseModel* noise) {
            return build_family(family_from_string(family), std::move(lattice), noise);
        },
        py::arg("family"), py::arg("lattice"), py::arg("noise") = nullptr);
    m.def("validate_consistency", [](const CodeLayout& c) { return validate_consistency(c); });
    m.def("stabilizer_rank", &stabilizer_rank);

    m.def("extract_syndrome", &extract_syndrome, py::arg("error"), py::arg("code"));
    m.def(
        "is_logical_failure",
        [](const PauliOperator& residual, const CodeLayout& code) {
            return to_string(is_logical_failure(residual, code.logicals(), code));
        },
        py::arg("residual"), py::arg("code"));

    m.def("sample_error",
          [](const NoiseModel& model, const CodeLayout& code, std::uint64_t seed) {
              return sample_error(model, code.lattice(), seed).op;
          });

    m.def(
        "decode",
        [](const Syndrome& syndrome, const CodeLayout& code, const std::string& metric,
           const NoiseModel& noise, std::optional<double> p1, std::optional<double> p2,
           std::optional<double> wx, std::optional<double> wz) {
            return decode(syndrome, code, metric_from_name(metric, p1, p2, wx, wz), noise).op;
        },
        py::arg("syndrome"), py::arg("code"), py::arg("metric"), py::arg("noise"),
        py::arg("p1") = std::nullopt, py::arg("p2") = std::nullopt, py::arg("wx") = std::nullopt,
        py::arg("wz") = std::nullopt);

    m.def("min_weight_perfect_matching",
          [](int n, const std::vector<std::tuple<int, int, double>>& edges) {
              std::vector<WeightedEdge> es;
              es.reserve(edges.size());
              for (const auto& [u, v, w] : edges) es.push_back({u, v, w});
              return min_weight_perfect_matching(n, es);
          });

    m.def(
        "run_sweep",
        [](const std::string& family, const std::vector<int>& distances, const std::string& layout,
           const std::vector<double>& p_values, const std::string& noise_kind, double sigma_p,
           double sigma_tot, const std::string& metric, long trials, std::uint64_t seed, int workers) {
            ExperimentSpec spec;
            spec.family = family_from_string(family);
            const Layout lay = layout_from_string(layout);
            for (int d : distances) spec.lattices.push_back({d, d, lay});
            spec.p_values = p_values;
            spec.trials = trials;
            spec.master_seed = seed;
            if (noise_kind == "iid") {
                spec.noise.kind = NoiseKind::IID;
            } else if (noise_kind == "gaussian") {
                spec.noise.kind = NoiseKind::Gaussian;
                spec.noise.sigma_p = sigma_p;
                spec.noise.sigma_tot = sigma_tot;
            } else {
                throw std::invalid_argument("noise_kind must be iid or gaussian");
            }
            if (metric == "manhattan") {
                spec.metric.kind = MetricKind::Manhattan;
            } else if (metric == "weighted_manhattan") {
                spec.metric.kind = MetricKind::WeightedManhattan;
            } else if (metric == "dijkstra") {
                spec.metric.kind = MetricKind::Dijkstra;
            } else {
                throw std::invalid_argument("unsupported metric for run_sweep");
            }
            const auto result = run_sweep(spec, workers);
            py::list out;
            for (const auto& pt : result.points) {
                py::dict row;
                row["d1"] = pt.lattice.d1;
                row["d2"] = pt.lattice.d2;
                row["p"] = pt.p;
                row["trials"] = pt.trials;
                row["failures"] = pt.failures;
                row["p_fail"] = pt.p_fail();
                row["stderr"] = pt.stderr_();
                out.append(std::move(row));
            }
            return out;
        },
        py::arg("family"), py::arg("distances"), py::arg("layout"), py::arg("p_values"),
        py::arg("noise_kind"), py::arg("sigma_p"), py::arg("sigma_tot"), py::arg("metric"),
        py::arg("trials"), py::arg("seed"), py::arg("workers") = 1);

    m.def("fit_threshold",
          [](const std::vector<std::tuple<int, double, double, double, long>>& points, double lo,
             double hi) {
              std::vector<CurvePoint> pts;
              for (const auto& [d, p, pf, se, tr] : points) pts.push_back({d, p, pf, se, tr});
              const auto fit = fit_threshold(pts, {lo, hi});
              py::dict out;
              out["p_th"] = fit.p_th;
              out["p_th_stderr"] = fit.p_th_stderr();
              out["nu"] = fit.nu;
              out["chi2"] = fit.chi2;
              return out;
          });

    m.attr("__version__") = "0.1.0";
}

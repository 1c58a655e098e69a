// Python bindings for the main pipeline operations.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gibbs/verify.hpp"

namespace py = pybind11;
using namespace gibbs;

namespace {

IntMat2 to_mat(const std::vector<std::vector<long long>>& m) {
  if (m.size() != 2 || m[0].size() != 2 || m[1].size() != 2)
    throw py::value_error("matrix must be 2x2");
  return IntMat2{{{m[0][0], m[0][1]}, {m[1][0], m[1][1]}}};
}

PotentialInput input_from(const SubshiftSpec& spec, const py::object& obj) {
  if (obj.is_none()) return PotentialInput::zero();
  if (py::isinstance<py::float_>(obj) || py::isinstance<py::int_>(obj))
    return PotentialInput::from_table(
        Potential::constant(spec, obj.cast<double>()));
  // list of trig terms (m, n, cos, sin)
  TrigPolynomial poly;
  for (const auto& item : obj.cast<py::list>()) {
    auto t = item.cast<py::tuple>();
    TrigPolynomial::Term term;
    term.m = t[0].cast<int>();
    term.n = t[1].cast<int>();
    term.cos_coeff = t[2].cast<double>();
    term.sin_coeff = t.size() > 3 ? t[3].cast<double>() : 0.0;
    poly.terms.push_back(term);
  }
  return PotentialInput::from_trig(poly);
}

class PySubshift {
 public:
  explicit PySubshift(const std::vector<std::vector<int>>& matrix)
      : spec_(build_sft(matrix)) {}

  double pf_eigenvalue() const { return spec_.pf_eigenvalue; }
  double entropy() const { return spec_.entropy; }
  int mixing_time() const { return spec_.mixing_time; }
  int alphabet_size() const { return spec_.alphabet_size; }

  std::size_t count_words_at(int n) const { return count_words(spec_, n); }
  std::vector<std::vector<int>> words(int n) const {
    std::vector<std::vector<int>> out;
    for (const Word& w : admissible_words(spec_, n))
      out.push_back(std::vector<int>(w.symbols.begin(), w.symbols.end()));
    return out;
  }
  std::size_t periodic_count(int n) const {
    return periodic_words(spec_, n).size();
  }

  double pressure_of(const std::vector<double>& depth1_values) const {
    Potential phi(spec_, 1, depth1_values);
    return pressure(spec_, phi, 8).value;
  }
  std::vector<double> brs_masses(const std::vector<double>& depth1_values,
                                 int depth) const {
    Potential phi(spec_, 1, depth1_values);
    return brs_measure(spec_, phi, depth).masses;
  }

 private:
  SubshiftSpec spec_;
};

class PyStructure {
 public:
  PyStructure(const std::vector<std::vector<long long>>& matrix,
              const py::object& phi_u, const py::object& phi_s, int depth) {
    auto part = std::make_shared<const MarkovPartition>(
        catmap_partition(build_automorphism(to_mat(matrix))));
    auto spec_t = build_sft(transpose(part->sft().matrix));
    st_ = synthesize_structure(part, input_from(part->sft(), phi_u),
                               input_from(spec_t, phi_s), depth);
  }

  double P_u() const { return st_.P_u; }
  double P_s() const { return st_.P_s; }
  double resolution() const { return st_.resolution(); }
  int depth() const { return st_.depth; }

  std::pair<std::vector<double>, std::vector<double>> F_u() const {
    return {st_.F_u.breakpoints, st_.F_u.cumulative};
  }
  std::pair<std::vector<double>, std::vector<double>> F_s() const {
    return {st_.F_s.breakpoints, st_.F_s.cumulative};
  }

  std::pair<double, double> apply(double x, double y) const {
    Vec2 q = apply_h(st_, Vec2{x, y});
    return {q.x, q.y};
  }
  std::pair<double, double> conjugated(double x, double y) const {
    Vec2 q = conjugated_map(st_, Vec2{x, y});
    return {q.x, q.y};
  }

  py::list eigencheck(int max_period) const {
    py::list rows;
    int orbit = 0;
    for (int n = 1; n <= max_period; ++n) {
      for (const Vec2& p :
           periodic_orbit_representatives(st_.part->aut, n)) {
        auto meas = measured_eigenvalues(st_, p, n, st_.depth);
        auto pred = predicted_eigenvalues(st_, p, n);
        py::dict row;
        row["orbit"] = orbit++;
        row["n"] = n;
        row["point"] = py::make_tuple(p.x, p.y);
        row["lambda_u_meas"] = meas.lambda_u;
        row["lambda_u_pred"] = pred.lambda_u;
        row["lambda_s_meas"] = meas.lambda_s;
        row["lambda_s_pred"] = pred.lambda_s;
        rows.append(row);
      }
    }
    return rows;
  }

 private:
  SmoothStructure st_;
};

py::list run_suite(const std::vector<std::vector<long long>>& matrix,
                   const py::object& phi_u, const py::object& phi_s,
                   int depth, std::uint64_t seed) {
  auto part = std::make_shared<const MarkovPartition>(
      catmap_partition(build_automorphism(to_mat(matrix))));
  auto spec_t = build_sft(transpose(part->sft().matrix));
  auto reports =
      run_verify_suite(part, input_from(part->sft(), phi_u),
                       input_from(spec_t, phi_s), depth, seed);
  py::list out;
  for (const auto& rep : reports) {
    py::dict d;
    d["name"] = rep.name;
    d["pass"] = rep.pass;
    d["worst_deviation"] = rep.worst_deviation;
    d["bound"] = rep.bound;
    d["samples"] = rep.samples;
    d["params"] = rep.params;
    out.append(d);
  }
  return out;
}

py::dict partition_info(const std::vector<std::vector<long long>>& matrix) {
  MarkovPartition part = catmap_partition(build_automorphism(to_mat(matrix)));
  py::dict d;
  d["symbols"] = part.symbols();
  d["lambda"] = part.sft().pf_eigenvalue;
  d["entropy"] = part.sft().entropy;
  d["mixing_time"] = part.sft().mixing_time;
  d["transition"] = part.sft().matrix;
  py::list rects;
  for (const auto& b : part.boxes) {
    py::dict r;
    r["u"] = py::make_tuple(b.u0, b.u1);
    r["s"] = py::make_tuple(b.s0, b.s1);
    rects.append(r);
  }
  d["rectangles"] = rects;
  return d;
}

py::list periodic_points(const std::vector<std::vector<long long>>& matrix,
                         int n) {
  py::list out;
  for (const Vec2& p :
       torus_periodic_points(build_automorphism(to_mat(matrix)), n))
    out.append(py::make_tuple(p.x, p.y));
  return out;
}

}  // namespace

PYBIND11_MODULE(_gibbscharts, m) {
  m.doc() =
      "Gibbs measures on subshifts of finite type and smooth structures on "
      "toral automorphisms";

  py::register_exception<Error>(m, "GibbsError");

  py::class_<PySubshift>(m, "Subshift")
      .def(py::init<const std::vector<std::vector<int>>&>(), py::arg("matrix"))
      .def_property_readonly("pf_eigenvalue", &PySubshift::pf_eigenvalue)
      .def_property_readonly("entropy", &PySubshift::entropy)
      .def_property_readonly("mixing_time", &PySubshift::mixing_time)
      .def_property_readonly("alphabet_size", &PySubshift::alphabet_size)
      .def("count_words", &PySubshift::count_words_at, py::arg("n"))
      .def("words", &PySubshift::words, py::arg("n"))
      .def("periodic_count", &PySubshift::periodic_count, py::arg("n"))
      .def("pressure", &PySubshift::pressure_of, py::arg("depth1_values"))
      .def("brs_masses", &PySubshift::brs_masses, py::arg("depth1_values"),
           py::arg("depth"));

  py::class_<PyStructure>(m, "Structure")
      .def(py::init<const std::vector<std::vector<long long>>&,
                    const py::object&, const py::object&, int>(),
           py::arg("matrix"), py::arg("phi_u") = py::none(),
           py::arg("phi_s") = py::none(), py::arg("depth") = 10)
      .def_property_readonly("P_u", &PyStructure::P_u)
      .def_property_readonly("P_s", &PyStructure::P_s)
      .def_property_readonly("resolution", &PyStructure::resolution)
      .def_property_readonly("depth", &PyStructure::depth)
      .def("F_u", &PyStructure::F_u)
      .def("F_s", &PyStructure::F_s)
      .def("apply_h", &PyStructure::apply, py::arg("x"), py::arg("y"))
      .def("conjugated_map", &PyStructure::conjugated, py::arg("x"),
           py::arg("y"))
      .def("eigencheck", &PyStructure::eigencheck, py::arg("max_period") = 4);

  m.def("partition_info", &partition_info, py::arg("matrix"));
  m.def("periodic_points", &periodic_points, py::arg("matrix"), py::arg("n"));
  m.def("verify_suite", &run_suite, py::arg("matrix"),
        py::arg("phi_u") = py::none(), py::arg("phi_s") = py::none(),
        py::arg("depth") = 8, py::arg("seed") = 1);
}

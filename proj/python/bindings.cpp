// SPDX-License-Identifier: Apache-2.0
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <json.hpp>

#include "helio/dataset.hpp"
#include "helio/error.hpp"
#include "helio/eval.hpp"
#include "helio/explain.hpp"
#include "helio/features.hpp"
#include "helio/learner.hpp"
#include "helio/model.hpp"
#include "helio/pipeline.hpp"
#include "helio/tuner.hpp"

namespace py = pybind11;
using namespace helio;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const Array& a) {
  if (a.ndim() != 2) throw py::value_error("expected a 2-D array");
  const auto rows = static_cast<std::size_t>(a.shape(0)), cols = static_cast<std::size_t>(a.shape(1));
  return Matrix(rows, cols, std::vector<double>(a.data(), a.data() + rows * cols));
}

std::vector<double> to_vector(const Array& a) {
  if (a.ndim() != 1) throw py::value_error("expected a 1-D array");
  return std::vector<double>(a.data(), a.data() + a.shape(0));
}

// Both copy their input into a new array.
Array to_array(const Matrix& m) {
  return Array(std::vector<py::ssize_t>{static_cast<py::ssize_t>(m.rows()), static_cast<py::ssize_t>(m.cols())},
               m.data().data());
}

Array to_array(const std::vector<double>& v) {
  return Array(std::vector<py::ssize_t>{static_cast<py::ssize_t>(v.size())}, v.data());
}

TabularDataset make_dataset(const Array& x, const std::vector<std::string>& names, const std::vector<double>& y) {
  TabularDataset ds;
  ds.rows = to_matrix(x);
  if (names.size() != ds.rows.cols()) throw py::value_error("one feature name per column required");
  for (const auto& n : names) ds.schema.push_back({n, ColumnKind::feature, ""});
  ds.schema.push_back({"target", ColumnKind::target, ""});
  ds.target = y.empty() ? std::vector<double>(ds.rows.rows(), 0.0) : y;
  if (ds.target.size() != ds.rows.rows()) throw py::value_error("target length differs from the row count");
  validate_schema(ds.schema);
  return ds;
}

py::dict dataset_dict(const TabularDataset& ds) {
  py::dict d;
  d["x"] = to_array(ds.rows);
  d["y"] = to_array(ds.target);
  d["feature_names"] = ds.feature_names();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bindings for the helio irradiance forecasting library";

  static py::exception<Error> error_type(m, "HelioError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const std::string msg = std::string(errc_name(e.code())) + ": " + e.what();
      PyErr_SetString(error_type.ptr(), msg.c_str());
    }
  });

  m.def("synth", [](std::size_t n, std::uint64_t seed) { return dataset_dict(synth_generate(n, seed)); },
        py::arg("n") = 8760, py::arg("seed") = 42);

  m.def("mae", [](const Array& p, const Array& a) { return mae(to_vector(p), to_vector(a)); });
  m.def("rmse", [](const Array& p, const Array& a) { return rmse(to_vector(p), to_vector(a)); });
  m.def("r2", [](const Array& p, const Array& a) { return r2(to_vector(p), to_vector(a)); });
  m.def("pearson", [](const Array& x, const Array& y) { return pearson(to_vector(x), to_vector(y)); });
  m.def("expected_improvement", [](double mu, double sigma, double best) { return expected_improvement(mu, sigma, best); });

  m.def(
      "split_train_test",
      [](std::size_t n, double fraction, std::uint64_t seed, bool shuffle) {
        const auto s = split_train_test(n, fraction, seed, shuffle);
        return py::make_tuple(s.train, s.test);
      },
      py::arg("n"), py::arg("train_fraction") = 0.8, py::arg("seed") = 0, py::arg("shuffle") = true);

  py::class_<ModelBundle>(m, "Model")
      .def_property_readonly("kind", [](const ModelBundle& b) { return std::string(model_kind(b.model)); })
      .def_property_readonly("feature_names", [](const ModelBundle& b) { return b.feature_names; })
      // Columns are named by `feature_names` when given (the model picks its own
      // features from them), otherwise they must be exactly the model's features.
      .def(
          "predict",
          [](const ModelBundle& b, const Array& x, std::optional<std::vector<std::string>> names) {
            return to_array(b.predict(make_dataset(x, names.value_or(b.feature_names), {})));
          },
          py::arg("x"), py::arg("feature_names") = py::none())
      .def(
          "shap",
          [](const ModelBundle& b, const Array& x, std::optional<std::vector<std::string>> names) {
            const auto attr = tree_shap(b, make_dataset(x, names.value_or(b.feature_names), {}));
            return py::make_tuple(attr.base_value, to_array(attr.phi));
          },
          py::arg("x"), py::arg("feature_names") = py::none())
      .def("to_json", [](const ModelBundle& b) { return model_to_json(b); })
      .def("save", [](const ModelBundle& b, const std::filesystem::path& p) { save_model(p, b); });

  m.def(
      "fit",
      [](const Array& x, const Array& y, const std::vector<std::string>& names, const std::string& options) {
        const auto cfg = parse_config(nlohmann::json::parse(options));
        return fit_learner(effective_learner(cfg, cfg.learner), make_dataset(x, names, to_vector(y)));
      },
      py::arg("x"), py::arg("y"), py::arg("feature_names"), py::arg("options_json") = "{}");
  m.def("load_model", [](const std::filesystem::path& p) { return load_model(p); });
  m.def("model_from_json", [](const std::string& text) { return model_from_json(text); });

  m.def(
      "run_command",
      [](const std::string& command, const std::string& config_json, std::optional<std::filesystem::path> model,
         std::optional<std::size_t> max_rows) {
        const auto cfg = parse_config(nlohmann::json::parse(config_json));
        return run_command(command, cfg, CommandOptions{std::move(model), max_rows}).to_json().dump();
      },
      py::arg("command"), py::arg("config_json") = "{}", py::arg("model") = py::none(), py::arg("max_rows") = py::none());
}

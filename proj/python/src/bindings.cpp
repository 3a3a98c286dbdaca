#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "slfv/commands.hpp"

namespace py = pybind11;
using slfv::Json;

namespace {

Json parse(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw py::value_error(std::string("config is not valid JSON: ") + e.what());
  }
}

slfv::Artifacts run(const std::string& command, const std::string& config, std::optional<std::uint64_t> seed,
                    int threads) {
  const Json cfg = parse(config);
  slfv::RunContext ctx;
  ctx.seed = slfv::resolve_seed(cfg, seed ? &*seed : nullptr);
  ctx.threads = threads;
  if (command == "params") return slfv::cmd_params(cfg, ctx);
  if (command == "wmf") return slfv::cmd_wmf(cfg, ctx);
  if (command == "dual") return slfv::cmd_dual(cfg, ctx);
  if (command == "forward") return slfv::cmd_forward(cfg, ctx);
  if (command == "qv") return slfv::cmd_qv(cfg, ctx);
  if (command == "gencheck") return slfv::cmd_gencheck(cfg, ctx);
  throw py::value_error("unknown command '" + command + "'");
}

std::string derive(const std::string& regime) {
  const auto p = slfv::regime_from_json(parse(regime));
  slfv::validate(p);
  return slfv::to_json(slfv::derive_params(p)).dump();
}

std::vector<double> wm_curve(int d, double alpha, double beta, double mu, const std::vector<double>& r,
                             double normalize_at, double gamma, double diffusivity) {
  Json sets = Json::array({{{"alpha", alpha}, {"beta", beta}, {"gamma", gamma}, {"diffusivity", diffusivity}}});
  auto curves = slfv::wmf_curves_from_json(sets, d, "curve");
  std::vector<double> out;
  for (const auto& row : slfv::wmf_table(curves, d, mu, r, normalize_at)) out.push_back(row[0]);
  return out;
}

}  // namespace

PYBIND11_MODULE(_slfv, m) {
  // ValueError subclass carrying the offending config field in .field
  static PyObject* param_error = PyErr_NewException("slfv._slfv.ParamError", PyExc_ValueError, nullptr);
  m.add_object("ParamError", py::handle(param_error));
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const slfv::ParamError& e) {
      py::object inst = py::reinterpret_borrow<py::object>(param_error)(e.what());
      inst.attr("field") = e.field();
      PyErr_SetObject(param_error, inst.ptr());
    }
  });

  m.def("run", &run, py::arg("command"), py::arg("config"), py::arg("seed") = py::none(), py::arg("threads") = 1,
        "Run a command on a JSON config; returns [(file name, content)].");
  m.def("derive", &derive, py::arg("regime"), "Derived parameters of a regime, as JSON text.");
  m.def("config_hash", [](const std::string& config) { return slfv::hex64(slfv::config_hash(parse(config))); },
        py::arg("config"));
  m.def("wm_curve", &wm_curve, py::arg("d"), py::arg("alpha"), py::arg("beta"), py::arg("mu"), py::arg("r"),
        py::arg("normalize_at") = 0.0, py::arg("gamma") = 1.0, py::arg("diffusivity") = 1.0);
}

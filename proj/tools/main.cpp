// gbsim: batch front door to the exact, B-master and stochastic engines.

#include <chrono>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "gbs/engines.hpp"
#include "gbs/io.hpp"
#include "gbs/selftest.hpp"
#include "gbs/version.hpp"

namespace {

std::string utc_timestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

void emit(gbs::io::ResultTable& table, const std::string& out, const std::string& format) {
  table.meta.timestamp = utc_timestamp();
  if (out.empty() || out == "-") {
    std::cout << gbs::io::render_csv(table);
    return;
  }
  if (format == "json")
    gbs::io::write_json(table, out);
  else
    gbs::io::write_csv(table, out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grassmann B-representation fermion dynamics (exact / B-master / stochastic)"};
  app.set_version_flag("--version", gbs::kVersion);

  std::string mode, model_path, out_path, format = "csv", scheme_str = "stratonovich";
  std::string observables, engines = "sde,exact", inputs;
  int n_traj = 10000;
  double dt = 1e-3;
  std::uint64_t seed = 0;
  bool seed_set = false;

  app.add_option("--mode", mode, "exact | b-master | sde | validate | compare")->required();
  app.add_option("--model", model_path, "model file (JSON)");
  app.add_option("--out", out_path, "output path ('-' for stdout)");
  app.add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--n-traj", n_traj, "trajectory count (sde)");
  app.add_option("--dt", dt, "step size (sde)");
  app.add_option("--scheme", scheme_str, "stratonovich | ito")
      ->check(CLI::IsMember({"stratonovich", "ito"}));
  app.add_option_function<std::uint64_t>(
         "--seed", [&](std::uint64_t s) { seed = s; seed_set = true; },
         "master seed (mandatory in sde mode)");
  app.add_option("--observables", observables, "e.g. n1,n2,1:2,@matrix.json (default: n1..nM)");
  app.add_option("--engines", engines, "compare mode: two of exact|b-master|sde");
  app.add_option("--inputs", inputs, "compare mode: two existing result CSVs");

  CLI11_PARSE(app, argc, argv);

  try {
    if (mode == "validate") {
      bool ok = gbs::run_validation(std::cout);
      std::cout << (ok ? "validation passed" : "validation FAILED") << "\n";
      return ok ? 0 : 1;
    }

    gbs::Scheme scheme = scheme_str == "ito" ? gbs::Scheme::ito_euler
                                             : gbs::Scheme::stratonovich_heun;

    auto run_engine = [&](const std::string& engine, const gbs::ModelSpec& spec,
                          const std::vector<gbs::NamedObservable>& obs) {
      if (engine == "exact") return gbs::run_exact(spec, obs);
      if (engine == "b-master") return gbs::run_bmaster(spec, obs);
      if (engine == "sde") {
        if (!seed_set)
          throw std::invalid_argument("--seed is mandatory for sde runs (no silent nondeterminism)");
        return gbs::run_sde(spec, obs, {n_traj, dt, scheme, seed});
      }
      throw std::invalid_argument("unknown engine: " + engine);
    };

    if (mode == "compare") {
      gbs::io::ResultTable a, b;
      if (!inputs.empty()) {
        auto comma = inputs.find(',');
        if (comma == std::string::npos)
          throw std::invalid_argument("--inputs needs two comma-separated paths");
        a = gbs::io::read_csv(inputs.substr(0, comma));
        b = gbs::io::read_csv(inputs.substr(comma + 1));
      } else {
        if (model_path.empty()) throw std::invalid_argument("compare: --model required");
        auto comma = engines.find(',');
        if (comma == std::string::npos)
          throw std::invalid_argument("--engines needs two comma-separated names");
        gbs::ModelSpec spec = gbs::io::load_model(model_path);
        auto obs = gbs::parse_observables(observables, spec.modes);
        a = run_engine(engines.substr(0, comma), spec, obs);
        b = run_engine(engines.substr(comma + 1), spec, obs);
        // the sde table carries ratio/trace rows the deterministic engines lack
        auto prune = [](gbs::io::ResultTable& t) {
          std::erase_if(t.rows, [](const gbs::io::ResultRow& r) {
            return r.observable == "trace" || r.observable.find('[') != std::string::npos;
          });
        };
        prune(a);
        prune(b);
      }
      auto rep = gbs::io::compare_results(a, b);
      gbs::io::print_report(rep, std::cout);
      return 0;
    }

    if (mode != "exact" && mode != "b-master" && mode != "sde")
      throw std::invalid_argument("unknown mode: " + mode);
    if (model_path.empty()) throw std::invalid_argument(mode + ": --model required");

    gbs::ModelSpec spec = gbs::io::load_model(model_path);
    auto obs = gbs::parse_observables(observables, spec.modes);
    gbs::io::ResultTable table = run_engine(mode, spec, obs);
    table.meta.model_hash = gbs::io::file_hash(model_path);
    emit(table, out_path, format);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "gbsim: " << e.what() << "\n";
    return 2;
  }
}

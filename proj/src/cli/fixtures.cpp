#include "heisliou/cli.hpp"

namespace heis::cli {

json lyapunov_fixture_config(const std::string& name, std::optional<double> gamma, std::optional<double> c0) {
  const auto term = [](json drift, double c) { return json{{"drift", std::move(drift)}, {"c", c}}; };
  if (name == "zero-coeffs") {
    return json{{"condition", "condcor1"}, {"d", 1}, {"lambda", 1.0}, {"Lambda", 1.0},
                {"family", json{{"space", "horizontal"}, {"terms", json::array({term(json{{"kind", "zero"}}, 0.0)})}}}};
  }
  if (name == "schro") {
    return json{{"condition", "schrodinger"},
                {"d", 1},
                {"lambda", 1.0},
                {"Lambda", 2.0},
                {"variant", "sign"},
                {"family", json{{"space", "euclidean"},
                                {"terms", json::array({term(json{{"kind", "zero"}}, c0.value_or(1.0))})}}},
                {"region", json{{"rho_min", 10.0}}}};
  }
  if (name == "hou") {
    return json{{"condition", "condcor1"},
                {"d", 1},
                {"lambda", 1.0},
                {"Lambda", 2.0},
                {"family", json{{"space", "horizontal"},
                                {"terms", json::array({term(json{{"kind", "eta"}, {"scale", -gamma.value_or(1.0)}}, 0.0)})}}}};
  }
  if (name == "outype") {
    return json{{"condition", "outype"},
                {"d", 1},
                {"lambda", 1.0},
                {"Lambda", 2.0},
                {"gamma", gamma.value_or(1.0)},
                {"family", json{{"space", "euclidean"},
                                {"terms", json::array({term(json{{"kind", "linear"}, {"scale", -1.0}}, 0.0)})}}}};
  }
  throw ConfigError("unknown lyapunov fixture '" + name + "' (expected zero-coeffs|schro|hou|outype)");
}

const std::vector<Fixture>& fixtures() {
  static const std::vector<Fixture> all = [] {
    std::vector<Fixture> f;
    const auto verify = [&](std::string name, std::string desc, json cfg) {
      f.push_back({std::move(name), FixtureKind::verify, std::move(desc), std::move(cfg), kPass});
    };
    verify("u2", "Euclidean u2, d=3, lambda=1, Lambda=2: M+ >= 0",
           json{{"profile", "u2"}, {"d", 3}, {"lambda", 1.0}, {"Lambda", 2.0}});
    verify("u3", "Euclidean u3, d=4, lambda=1, Lambda=2: M+ <= 0",
           json{{"profile", "u3"}, {"d", 4}, {"lambda", 1.0}, {"Lambda", 2.0}});
    verify("u_tilde-d1", "u_tilde on H^1: -Delta_H >= 0", json{{"profile", "u_tilde"}, {"d", 1}});
    verify("u_tilde-d2", "u_tilde on H^2: -Delta_H >= 0", json{{"profile", "u_tilde"}, {"d", 2}});
    verify("u4", "u4 on H^2, lambda=1, Lambda=2: M+ <= 0",
           json{{"profile", "u4"}, {"d", 2}, {"lambda", 1.0}, {"Lambda", 2.0}});
    verify("u5", "u5 on H^2, lambda=1, Lambda=2: M+ >= 0",
           json{{"profile", "u5"}, {"d", 2}, {"lambda", 1.0}, {"Lambda", 2.0}});
    verify("folland", "rho^{2-Q} on H^1 is Delta_H-harmonic off the origin", json{{"profile", "folland"}, {"d", 1}});
    verify("log-rho-pucci-min", "M- of log rho against (lambda - Lambda(Q-1))|x_H|^2/rho^4",
           json{{"profile", "log_rho"}, {"d", 2}, {"lambda", 1.0}, {"Lambda", 2.0}, {"operator", "pucci-min"},
                {"compare_formula", true}});
    verify("log-rho-pucci-minus-alpha", "P- of log rho against (4d alpha - 3)|x_H|^2/rho^4",
           json{{"profile", "log_rho"}, {"d", 2}, {"operator", "pucci-minus-alpha"}, {"alpha", 0.125},
                {"sense", "sub"}, {"compare_formula", true}});
    f.push_back({"zero-coeffs", FixtureKind::lyapunov, "condcor1 with b = c = 0 fails since Q >= 4",
                 lyapunov_fixture_config("zero-coeffs", {}, {}), kFail});
    f.push_back({"schro", FixtureKind::lyapunov, "Schrodinger-type zeroth order c = 1, b = 0, rho_min = 10",
                 lyapunov_fixture_config("schro", {}, {}), kPass});
    f.push_back({"hou", FixtureKind::lyapunov, "horizontal OU drift b = -eta, c = 0",
                 lyapunov_fixture_config("hou", 1.0, {}), kPass});
    f.push_back({"outype", FixtureKind::lyapunov, "OU-type Euclidean drift b = -x with gamma = 1",
                 lyapunov_fixture_config("outype", 1.0, {}), kPass});
    f.push_back({"fd-folland", FixtureKind::convergence, "finite-difference order on rho^{2-Q}, H^1",
                 json{{"profile", "folland"}, {"d", 1}, {"min_order", 1.9}}, kPass});
    return f;
  }();
  return all;
}

const Fixture& fixture(const std::string& name) {
  for (const auto& f : fixtures())
    if (f.name == name) return f;
  throw ConfigError("unknown fixture '" + name + "'");
}

}  // namespace heis::cli

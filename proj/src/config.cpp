#include "cdr/config.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "cdr/toml.hpp"
#include "cdr/units.hpp"

namespace cdr::config {

namespace {

using toml::Table;
using toml::Value;

class Reader {
 public:
  explicit Reader(Table table) : table_(std::move(table)) {}

  double number(const std::string& key, double fallback) {
    const Value* v = take(key);
    if (!v) return fallback;
    if (v->kind != Value::Kind::Number) fail(key, *v, "a number");
    return v->num;
  }

  long integer(const std::string& key, long fallback) {
    const Value* v = take(key);
    if (!v) return fallback;
    if (v->kind != Value::Kind::Number || v->num != std::floor(v->num))
      fail(key, *v, "an integer");
    return static_cast<long>(v->num);
  }

  bool boolean(const std::string& key, bool fallback) {
    const Value* v = take(key);
    if (!v) return fallback;
    if (v->kind != Value::Kind::Boolean) fail(key, *v, "true or false");
    return v->boolean;
  }

  std::string text(const std::string& key, const std::string& fallback) {
    const Value* v = take(key);
    if (!v) return fallback;
    if (v->kind != Value::Kind::String) fail(key, *v, "a string");
    return v->str;
  }

  std::optional<double> optional_number(const std::string& key) {
    const Value* v = take(key);
    if (!v) return std::nullopt;
    if (v->kind != Value::Kind::Number) fail(key, *v, "a number");
    return v->num;
  }

  std::vector<double> array(const std::string& key,
                            std::vector<double> fallback) {
    const Value* v = take(key);
    if (!v) return fallback;
    if (v->kind != Value::Kind::Array) fail(key, *v, "an array of numbers");
    return v->array;
  }

  /// Accepts "auto" or a number.
  std::optional<double> auto_or_number(const std::string& key) {
    const Value* v = take(key);
    if (!v) return std::nullopt;
    if (v->kind == Value::Kind::String) {
      if (v->str == "auto") return std::nullopt;
      fail(key, *v, "\"auto\" or a number");
    }
    if (v->kind != Value::Kind::Number) fail(key, *v, "\"auto\" or a number");
    return v->num;
  }

  bool has(const std::string& key) const { return table_.count(key) > 0; }

  void finish() const {
    for (const auto& [key, value] : table_)
      if (!used_.count(key)) {
        std::ostringstream msg;
        msg << "unknown key '" << key << "' (line " << value.line << ")";
        throw ConfigError(msg.str());
      }
  }

 private:
  const Value* take(const std::string& key) {
    auto it = table_.find(key);
    if (it == table_.end()) return nullptr;
    used_.insert(key);
    return &it->second;
  }

  [[noreturn]] void fail(const std::string& key, const Value& v,
                         const std::string& expected) {
    std::ostringstream msg;
    msg << "key '" << key << "' (line " << v.line << "): expected " << expected;
    throw ConfigError(msg.str());
  }

  Table table_;
  std::set<std::string> used_;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

RunConfig build(Reader& r) {
  RunConfig cfg;
  hilbert::SystemParams& p = cfg.params;

  const double g_mhz = r.number("g_over_2pi_mhz", 30.0);
  require(g_mhz > 0.0, "g_over_2pi_mhz: coupling must be positive");
  p.g = units::mhz_to_rad_ns(g_mhz);

  const double omega_r_ghz = r.number("omega_r_over_2pi_ghz", 7.0);
  const double omega_q0_ghz = r.number("omega_q0_over_2pi_ghz", 6.0);
  require(omega_r_ghz > 0.0, "omega_r_over_2pi_ghz must be positive");
  require(omega_r_ghz > omega_q0_ghz,
          "omega_q0_over_2pi_ghz: idle detuning omega_r - omega_q0 must be positive");
  p.omega_r = units::ghz_to_rad_ns(omega_r_ghz);
  p.qubit.omega0 = units::ghz_to_rad_ns(omega_q0_ghz);
  p.qubit.delta0 = p.omega_r - p.qubit.omega0;

  const double detuning_mhz = r.number("detuning_over_2pi_mhz", 50.0);
  require(detuning_mhz > 0.0,
          "detuning_over_2pi_mhz: disperse-stage detuning must be positive");
  p.qubit.delta = units::mhz_to_rad_ns(detuning_mhz);

  const long levels = r.integer("qubit_levels", 2);
  require(levels == 2 || levels == 3, "qubit_levels must be 2 or 3");
  p.space.n_levels = static_cast<int>(levels);
  const double anh_mhz = r.number("anharmonicity_over_2pi_mhz", 200.0);
  if (levels == 3)
    require(anh_mhz > 0.0,
            "anharmonicity_over_2pi_mhz must be positive for three levels");
  p.anharmonicity = levels == 3 ? units::mhz_to_rad_ns(anh_mhz) : 0.0;

  const long n_max = r.integer("n_max", 40);
  require(n_max >= 2, "n_max must be >= 2");
  p.space.n_max = static_cast<int>(n_max);
  const double tail_tol = r.number("truncation_tail_tol", 1e-9);
  require(tail_tol > 0.0, "truncation_tail_tol must be positive");
  p.space.tail_tol = tail_tol;

  // Drive: either b0_over_2pi_mhz directly or a target n_bar (mutually
  // exclusive). Both photon-number conventions are tracked and reported.
  p.drive.t_b = r.number("t_b_ns", 3.0);
  p.drive.tau_b = r.number("tau_b_ns", 1.0);
  p.drive.sigma_b = r.number("sigma_b_ns", 1.0);
  require(p.drive.tau_b > 0.0, "tau_b_ns must be positive");
  require(p.drive.sigma_b > 0.0, "sigma_b_ns must be positive");
  const std::string carrier = r.text("drive_carrier", "omega_r");
  require(carrier == "omega_r",
          "drive_carrier: only \"omega_r\" is supported");
  p.drive.omega = p.omega_r;

  const bool has_b0 = r.has("b0_over_2pi_mhz");
  const bool has_n_bar = r.has("n_bar");
  require(!(has_b0 && has_n_bar),
          "b0_over_2pi_mhz and n_bar are mutually exclusive");
  const std::optional<double> n_bar = r.optional_number("n_bar");
  const std::optional<double> declared = r.optional_number("n_bar_nominal");
  if (n_bar) {
    require(*n_bar >= 0.0, "n_bar must be >= 0");
    p.drive.b0 = std::sqrt(*n_bar) / p.drive.tau_b;
    cfg.n_bar_nominal = declared.value_or(*n_bar);
  } else {
    const double b0_mhz = r.number("b0_over_2pi_mhz", 497.4);
    require(b0_mhz >= 0.0, "b0_over_2pi_mhz must be >= 0");
    p.drive.b0 = units::mhz_to_rad_ns(b0_mhz);
    const double integral = std::norm(pulse::lambda_in(p.drive));
    cfg.n_bar_nominal =
        declared.value_or(std::abs(b0_mhz - 497.4) < 1e-9 ? 9.0 : integral);
  }
  cfg.n_bar_integral = std::norm(pulse::lambda_in(p.drive));
  hilbert::check_truncation(cfg.n_bar_integral, p.space);

  p.qubit.t_q = r.number("t_q_ns", 3.25);
  p.qubit.sigma_q = r.number("sigma_q_ns", 3.0);
  p.qubit.t_qe = r.number("t_qe_ns", 30.0);
  p.qubit.sigma_qe = r.number("sigma_qe_ns", 1.0);
  require(p.qubit.sigma_q > 0.0, "sigma_q_ns must be positive");
  require(p.qubit.sigma_qe > 0.0, "sigma_qe_ns must be positive");
  require(p.qubit.t_qe > p.qubit.t_q, "t_qe_ns must exceed t_q_ns");

  const double dt_ps = r.number("dt_ps", 0.5);
  require(dt_ps > 0.0, "dt_ps must be positive");
  p.schedule.dt = units::ps_to_ns(dt_ps);
  p.schedule.t_f = p.qubit.t_qe + 2.0 * p.qubit.sigma_qe;
  p.schedule.t_d = p.drive.t_b + 0.5 * p.drive.tau_b;
  require(p.schedule.t_f > p.schedule.t_d && p.schedule.t_d > 0.0,
          "schedule: t_f > t_d > 0 violated; check t_qe_ns and t_b_ns");
  const double steps = p.schedule.t_f / p.schedule.dt;
  require(std::abs(steps - std::round(steps)) < 1e-6,
          "dt_ps: t_f / dt must be an integer step count");

  cfg.log_every = r.integer("log_every_steps", 50);
  require(cfg.log_every >= 1, "log_every_steps must be >= 1");

  cfg.detection.eta = r.number("eta", 1.0);
  require(cfg.detection.eta > 0.0 && cfg.detection.eta <= 1.0,
          "eta must be in (0, 1]");
  cfg.detection.phi = r.auto_or_number("phi");

  cfg.grid_points = static_cast<int>(r.integer("grid_points", 4096));
  require(cfg.grid_points >= 256, "grid_points must be >= 256");
  cfg.wigner = r.boolean("wigner", false);
  cfg.wigner_points = static_cast<int>(r.integer("wigner_points", 121));
  require(cfg.wigner_points >= 11, "wigner_points must be >= 11");
  cfg.threads = static_cast<int>(r.integer("threads", 0));
  require(cfg.threads >= 0, "threads must be >= 0");

  cfg.opt_t_f = r.number("opt_t_f_ns", 30.0);
  require(cfg.opt_t_f > 2.0 * p.qubit.sigma_qe,
          "opt_t_f_ns too short for the rear ramp");
  cfg.opt_budget = static_cast<int>(r.integer("opt_budget", 400));
  require(cfg.opt_budget >= 1, "opt_budget must be >= 1");

  const double dmin = r.number("opt_delta_min_mhz", 20.0);
  const double dmax = r.number("opt_delta_max_mhz", 400.0);
  const double smin = r.number("opt_sigma_q_min_ns", 1.0);
  const double smax = r.number("opt_sigma_q_max_ns", 10.0);
  const double tqmin = r.number("opt_t_q_min_ns", 2.0);
  const double tqmax = r.number("opt_t_q_max_ns", 10.0);
  require(dmin > 0.0 && dmax > dmin, "opt delta bounds are degenerate");
  require(smin > 0.0 && smax > smin, "opt sigma_q bounds are degenerate");
  require(tqmax > tqmin, "opt t_q bounds are degenerate");
  cfg.opt_bounds.delta_min = units::mhz_to_rad_ns(dmin);
  cfg.opt_bounds.delta_max = units::mhz_to_rad_ns(dmax);
  cfg.opt_bounds.sigma_min = smin;
  cfg.opt_bounds.sigma_max = smax;
  cfg.opt_bounds.tq_min = tqmin;
  cfg.opt_bounds.tq_max = tqmax;

  cfg.sweep_axis = r.text("sweep_axis", "t_f");
  require(cfg.sweep_axis == "t_f" || cfg.sweep_axis == "n_bar" ||
              cfg.sweep_axis == "eta",
          "sweep_axis must be \"t_f\", \"n_bar\" or \"eta\"");
  cfg.sweep_values = r.array(
      "sweep_values", cfg.sweep_axis == "t_f"
                          ? std::vector<double>{24, 26, 28, 30, 32, 34}
                          : std::vector<double>{});
  require(!cfg.sweep_values.empty() || cfg.sweep_axis != "n_bar",
          "sweep_values required for a n_bar sweep");
  cfg.sweep_n_bar = r.array("sweep_n_bar_values", {});

  r.finish();
  return cfg;
}

}  // namespace

RunConfig default_config() {
  Reader r(toml::Table{});
  return build(r);
}

RunConfig parse_config_text(const std::string& text) {
  Reader r(toml::parse(text));
  return build(r);
}

RunConfig parse_config(const std::string& path) {
  Reader r(toml::parse_file(path));
  return build(r);
}

}  // namespace cdr::config

#include "hww/config.hpp"

#include <cmath>

namespace hww {

const char* to_string(Mode mode) {
  switch (mode) {
    case Mode::analog: return "analog";
    case Mode::lww: return "lww";
    case Mode::hww: return "hww";
    case Mode::hww_ma: return "hww_ma";
    case Mode::hww_fourier: return "hww_fourier";
  }
  return "?";
}

std::optional<Mode> mode_from_string(std::string_view name) {
  if (name == "analog") return Mode::analog;
  if (name == "lww") return Mode::lww;
  if (name == "hww") return Mode::hww;
  if (name == "hww_ma") return Mode::hww_ma;
  if (name == "hww_fourier") return Mode::hww_fourier;
  return std::nullopt;
}

std::vector<std::string> validate_config(const RunConfig& c) {
  std::vector<std::string> v = c.material.validate();

  if (c.histories_per_step < 1) v.push_back("histories_per_step must be >= 1");
  if (!(c.theta >= 0.5 && c.theta <= 1.0)) v.push_back("theta must lie in [1/2, 1]");
  if (!(c.rho >= 1.0)) v.push_back("rho must be >= 1");
  if (!(c.eps_min > 0.0 && c.eps_min < 1.0)) v.push_back("eps_min must lie in (0,1)");
  if (c.u_ww < 0) v.push_back("u_ww must be >= 0");

  if (c.uses_hybrid_windows()) {
    if (static_cast<int>(c.update_fractions.size()) != c.u_ww)
      v.push_back("update_fractions count must equal u_ww");
    double prev = 0.0;
    for (double f : c.update_fractions) {
      if (!(f > 0.0 && f < 1.0)) {
        v.push_back("update fractions must lie in (0,1)");
        break;
      }
      if (!(f > prev)) {
        v.push_back("update fractions must increase");
        break;
      }
      prev = f;
    }
  }
  if (c.mode == Mode::hww_ma && c.ma_base_k < 0) v.push_back("ma_base_k must be >= 0");
  if (c.mode == Mode::hww_fourier && c.fourier_cutoff < 0)
    v.push_back("fourier_cutoff must be >= 0");

  if (c.batches < 2) v.push_back("batches must be >= 2");
  if (c.target_population != 0 && c.target_population < 1)
    v.push_back("target_population must be positive");

  if (!(c.x_min < c.x_max)) v.push_back("x_min must be < x_max");
  if (c.cells < 1) v.push_back("cells must be >= 1");
  if (!(c.t_end > 0.0)) v.push_back("t_end must be > 0");
  if (c.time_steps < 1) v.push_back("time_steps must be >= 1");
  if (!(c.source.strength > 0.0)) v.push_back("source strength must be > 0");
  if (c.source.x0 < c.x_min || c.source.x0 > c.x_max)
    v.push_back("source x0 must lie inside the mesh");

  return v;
}

}  // namespace hww

#include "ssd/config.hpp"

#include <string>
#include <vector>

namespace ssd {

namespace {

// Closed-form initial curves shared by the preset catalog.
RunConfig torus(double beta, double eps, int J, double dt, double t_end) {
  RunConfig c;
  c.model.beta = beta;
  c.eps = eps;
  c.J = J;
  c.dt = dt;
  c.t_end = t_end;
  c.initial.kind = "semicircle";
  c.initial.r0 = 10.0;
  c.initial.a = 1.0;
  c.initial.b = 1.0;
  return c;
}

RunConfig island(double beta, double eps, int J, double dt, double t_end, double a, double b) {
  RunConfig c = torus(beta, eps, J, dt, t_end);
  c.initial.kind = "quarter";
  c.initial.r0 = 0.0;
  c.initial.a = a;
  c.initial.b = b;
  return c;
}

RunConfig ring4(double sigma, double eps, int J, double dt, double t_end) {
  RunConfig c = torus(0.07, eps, J, dt, t_end);
  c.sigma = sigma;
  c.initial.r0 = 4.0;
  return c;
}

}  // namespace

RunConfig preset(const std::string& name) {
  RunConfig c;
  if (name == "ex1" || name == "ex1_convergence") {
    c = torus(0.07, 0.01, 32, 1.0 / 64.0, 2.0);
  } else if (name == "fig3") {
    c = torus(0.07, 0.01, 64, 1.0 / 256.0, 2.0);
  } else if (name == "fig3_beta01") {
    c = torus(0.1, 0.01, 64, 1.0 / 256.0, 2.0);
  } else if (name == "fig4") {
    c = island(0.07, 0.005, 64, 1.0 / 256.0, 2.0, 1.0, 1.0);
  } else if (name == "fig4_beta01") {
    c = island(0.1, 0.005, 64, 1.0 / 256.0, 2.0, 1.0, 1.0);
  } else if (name == "fig5" || name == "fig5_beta007") {
    c = torus(0.07, 0.01, 128, 1.0 / 256.0, 2.0);
  } else if (name == "fig5_beta008") {
    c = torus(0.08, 0.01, 128, 1.0 / 256.0, 2.0);
  } else if (name == "fig5_beta009") {
    c = torus(0.09, 0.01, 128, 1.0 / 256.0, 2.0);
  } else if (name == "fig5_beta01") {
    c = torus(0.1, 0.01, 128, 1.0 / 256.0, 2.0);
  } else if (name == "fig6" || name == "fig6_beta035") {
    c = torus(0.35, 0.01, 65, 5.0 / 128.0, 10.0);
  } else if (name == "fig6_beta04") {
    c = torus(0.4, 0.01, 65, 5.0 / 128.0, 10.0);
  } else if (name == "fig6_beta045") {
    c = torus(0.45, 0.01, 65, 5.0 / 128.0, 10.0);
  } else if (name == "fig6_beta05") {
    c = torus(0.5, 0.01, 65, 5.0 / 128.0, 10.0);
  } else if (name == "fig7" || name == "fig7_beta012") {
    c = island(0.12, 0.005, 65, 5.0 / 128.0, 10.0, 1.0, 1.0);
  } else if (name == "fig7_beta015") {
    c = island(0.15, 0.005, 65, 5.0 / 128.0, 10.0, 1.0, 1.0);
  } else if (name == "fig7_beta018") {
    c = island(0.18, 0.005, 65, 5.0 / 128.0, 10.0, 1.0, 1.0);
  } else if (name == "fig7_beta02") {
    c = island(0.2, 0.005, 65, 5.0 / 128.0, 10.0, 1.0, 1.0);
  } else if (name == "fig8" || name == "fig8_sigma_m06") {
    c = ring4(-0.6, 0.001, 100, 1.0 / 100.0, 10.0);
  } else if (name == "fig8_sigma0") {
    c = ring4(0.0, 0.001, 100, 1.0 / 100.0, 10.0);
  } else if (name == "fig8_sigma06") {
    c = ring4(0.6, 0.001, 100, 1.0 / 100.0, 10.0);
  } else if (name == "fig9") {
    c = ring4(-0.6, 0.001, 100, 1.0 / 50.0, 10.0);
  } else if (name == "fig10") {
    c = torus(0.07, 0.001, 100, 1.0 / 50.0, 3.0);
    c.initial.r0 = 20.0;
    c.initial.a = 8.0;
    c.initial.b = 0.14;
  } else if (name == "fig11") {
    c = island(0.1, 0.001, 50, 1.0 / 200.0, 0.5, 6.0, 0.2);
  } else {
    throw ConfigError("unknown preset \"" + name + "\"");
  }
  c.preset = name;
  return c;
}

std::vector<std::string> preset_names() {
  return {"ex1",          "ex1_convergence", "fig3",          "fig3_beta01",  "fig4",
          "fig4_beta01",  "fig5",            "fig5_beta007",  "fig5_beta008", "fig5_beta009",
          "fig5_beta01",  "fig6",            "fig6_beta035",  "fig6_beta04",  "fig6_beta045",
          "fig6_beta05",  "fig7",            "fig7_beta012",  "fig7_beta015", "fig7_beta018",
          "fig7_beta02",  "fig8",            "fig8_sigma_m06", "fig8_sigma0", "fig8_sigma06",
          "fig9",         "fig10",           "fig11"};
}

}  // namespace ssd

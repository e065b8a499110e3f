#include "ddc/presets.hpp"

#include "ddc/errors.hpp"

namespace ddc::experiment {

namespace {

LtiSystem tank4() {
  const double t1 = 62.0 / 60.0;
  const double t2 = 90.0 / 60.0;
  const double t3 = 23.0 / 60.0;
  const double t4 = 30.0 / 60.0;
  Matrix A(4, 4);
  A << -1.0 / t1, 0.0, 1.0 / t3, 0.0,
       0.0, -1.0 / t2, 0.0, 1.0 / t4,
       0.0, 0.0, -1.0 / t3, 0.0,
       0.0, 0.0, 0.0, -1.0 / t4;
  return LtiSystem(A, Matrix::Zero(4, 0));
}

LtiSystem heli8() {
  Matrix A(8, 8);
  A << -0.20, 0.02, 0.60, -0.98, 0.00, 0.10, 0.00, 0.00,
        0.05, -0.90, 0.30, -0.05, 0.00, 0.00, 0.00, 0.00,
        0.35, 0.08, -1.20, 0.00, 0.10, 0.20, 0.00, 0.00,
        0.00, 0.00, 1.00, 0.00, 0.00, 0.00, 0.00, 0.00,
        0.00, 0.00, -0.10, 0.00, -0.15, -0.70, 0.98, 0.00,
        0.00, 0.00, -0.30, 0.00, -0.45, -2.50, 0.00, 0.20,
        0.00, 0.00, 0.00, 0.00, 0.00, 1.00, 0.00, 0.05,
        0.05, 0.00, 0.10, 0.00, 0.30, -0.40, 0.00, -0.60;
  Matrix B(8, 4);
  B <<  0.10, 0.60, 0.00, 0.00,
       -1.20, 0.05, 0.00, 0.00,
        0.05, -1.50, 0.10, 0.00,
        0.00, 0.00, 0.00, 0.00,
        0.00, 0.00, 0.60, 0.10,
        0.10, -0.20, 2.50, 0.30,
        0.00, 0.00, 0.00, 0.00,
        0.30, 0.05, 0.40, -1.40;
  return LtiSystem(A, B);
}

LtiSystem plant42() {
  Matrix A(4, 4);
  A << 0.0, 1.0, 0.0, 0.0,
      -1.0, -0.2, 0.5, 0.0,
       0.0, 0.0, 0.0, 1.0,
       0.3, 0.0, -2.0, -0.1;
  Matrix B(4, 2);
  B << 0.0, 0.0,
       1.0, 0.0,
       0.0, 0.0,
       0.0, 1.0;
  return LtiSystem(A, B);
}

}  // namespace

LtiSystem preset_system(const std::string& name) {
  if (name == "tank4") return tank4();
  if (name == "heli8") return heli8();
  if (name == "plant42") return plant42();
  throw ValidationError("unknown system preset '" + name +
                        "' (known: tank4, heli8, plant42)");
}

std::vector<std::string> preset_names() { return {"tank4", "heli8", "plant42"}; }

}  // namespace ddc::experiment

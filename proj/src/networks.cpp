#include "pgibbs/networks.hpp"

namespace pgibbs::networks {

Network two_disease() {
  return Network({{"D1", 0.1}, {"D2", 0.1}, {"S1", 0.0}}, {{0, 1}, {2}}, {{0, 2, 1.0}, {1, 2, 1.0}}, {{2, 1}});
}

Network disease_triangle(double disease_leak, double symptom_leak) {
  return Network({{"D1", disease_leak},
                  {"D2", disease_leak},
                  {"D3", disease_leak},
                  {"S12", symptom_leak},
                  {"S23", symptom_leak},
                  {"S13", symptom_leak}},
                 {{0, 1, 2}, {3, 4, 5}},
                 {{0, 3, 1.0}, {1, 3, 1.0}, {1, 4, 1.0}, {2, 4, 1.0}, {0, 5, 1.0}, {2, 5, 1.0}},
                 {{3, 1}, {4, 1}, {5, 1}});
}

}  // namespace pgibbs::networks

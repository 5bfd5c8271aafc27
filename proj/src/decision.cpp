#include "npfuse/decision.hpp"

#include <string>

#include "npfuse/error.hpp"

namespace npfuse {

std::string_view to_string(Hypothesis h) { return h == Hypothesis::H0 ? "H0" : "H1"; }

Hypothesis parse_hypothesis(std::string_view text) {
  if (text == "H0" || text == "h0" || text == "0") return Hypothesis::H0;
  if (text == "H1" || text == "h1" || text == "1") return Hypothesis::H1;
  throw InputError("hypothesis must be H0 or H1, got '" + std::string(text) + "'");
}

DecisionRecord decide(double log_lr_total, double log_gamma) {
  DecisionRecord r;
  r.log_lr_total = log_lr_total;
  r.log_gamma = log_gamma;
  r.decision = log_lr_total >= log_gamma ? Hypothesis::H1 : Hypothesis::H0;
  return r;
}

}  // namespace npfuse

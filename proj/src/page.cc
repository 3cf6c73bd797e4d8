#include "threatcrawl/page.h"

#include "threatcrawl/errors.h"

namespace threatcrawl {

std::string_view label_name(Label l) {
  switch (l) {
    case Label::kIrrelevant: return "irrelevant";
    case Label::kRelevant: return "relevant";
    case Label::kSeedCandidate: return "seed_candidate";
  }
  return "irrelevant";
}

Label label_from_name(std::string_view name) {
  if (name == "irrelevant") return Label::kIrrelevant;
  if (name == "relevant") return Label::kRelevant;
  if (name == "seed_candidate") return Label::kSeedCandidate;
  throw Error("unknown label '" + std::string(name) + "'");
}

std::string_view origin_name(Origin o) {
  switch (o) {
    case Origin::kSeed: return "seed";
    case Origin::kForward: return "F";
    case Origin::kBacklink: return "B";
    case Origin::kKeyword: return "K";
  }
  return "seed";
}

Origin origin_from_action(Action a) {
  switch (a) {
    case Action::kForward: return Origin::kForward;
    case Action::kBacklink: return Origin::kBacklink;
    case Action::kKeyword: return Origin::kKeyword;
  }
  return Origin::kSeed;
}

}  // namespace threatcrawl

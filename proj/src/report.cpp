#include "pnet/report.hpp"

#include <nlohmann/json.hpp>

namespace pnet {

std::string Report::to_text() const {
  std::string out;
  for (const auto& c : checks) {
    out += c.check_id + "\t" + c.instance + "\t" + (c.passed ? "PASS" : "FAIL");
    if (!c.passed && (!c.lhs.empty() || !c.rhs.empty())) {
      out += "\tlhs=" + c.lhs + "\trhs=" + c.rhs;
    }
    out += "\n";
  }
  return out;
}

std::string Report::to_json() const {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    nlohmann::ordered_json rec;
    rec["check-id"] = c.check_id;
    rec["instance"] = c.instance;
    rec["status"] = c.passed ? "PASS" : "FAIL";
    rec["lhs"] = c.lhs;
    rec["rhs"] = c.rhs;
    arr.push_back(rec);
  }
  return arr.dump(2) + "\n";
}

}  // namespace pnet

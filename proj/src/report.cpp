#include "woldkit/report.hpp"

#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

namespace woldkit {

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

}  // namespace

std::string Report::to_text() const {
  std::ostringstream os;
  os << command << " " << input << "\n";
  os << "status: " << status;
  if (!method.empty()) os << "   method: " << method;
  if (n > 0) os << "   n: " << n;
  if (depth > 0) os << "   depth: " << depth;
  if (ambient_dim > 0) os << "   ambient: " << ambient_dim;
  os << "\n";
  if (!gate_reason.empty()) os << "gate: " << gate_reason << "\n";
  if (!defects.empty()) {
    os << "defects:";
    for (const auto& [name, value] : defects)
      os << "  " << name << " " << sci(value);
    os << "\n";
  }
  if (!blocks.empty()) {
    const bool with_expected = blocks.front().expected_dim.has_value();
    os << "\n";
    char head[160];
    std::snprintf(head, sizeof head, "%-10s %6s %-8s %12s %12s%s\n", "subset",
                  "dim", "classes", "reducing", "span-orth",
                  with_expected ? "   expected" : "");
    os << head;
    for (const BlockRow& row : blocks) {
      char line[160];
      std::snprintf(line, sizeof line, "%-10s %6lld %-8s %12s %12s",
                    row.subset.c_str(), static_cast<long long>(row.dim),
                    row.classes.c_str(), sci(row.joint_reducing).c_str(),
                    sci(row.span_orthogonality).c_str());
      os << line;
      if (row.expected_dim) {
        char exp[32];
        std::snprintf(exp, sizeof exp, " %10lld",
                      static_cast<long long>(*row.expected_dim));
        os << exp;
        if (*row.expected_dim != row.dim) os << " MISMATCH";
      }
      os << "\n";
    }
  }
  if (!agreement.empty()) {
    os << "\nmethod agreement:\n";
    for (const AgreementRow& row : agreement) {
      char line[160];
      std::snprintf(line, sizeof line, "%-10s direct %6lld recursive %6lld angle %s\n",
                    row.subset.c_str(), static_cast<long long>(row.direct_dim),
                    static_cast<long long>(row.recursive_dim),
                    sci(row.angle).c_str());
      os << line;
    }
  }
  if (!checks.empty()) {
    os << "\n";
    for (const CheckRow& row : checks) {
      char line[256];
      std::snprintf(line, sizeof line, "%-4s %-46s %12s  %s\n",
                    row.pass ? "ok" : "FAIL", row.name.c_str(),
                    sci(row.value).c_str(), row.note.c_str());
      os << line;
    }
  }
  if (!residuals.empty()) {
    os << "\nresiduals:";
    for (const auto& [name, value] : residuals)
      os << "  " << name << " " << sci(value);
    os << "\n";
  }
  for (const auto& [key, value] : notes) os << key << ": " << value << "\n";
  {
    char line[64];
    std::snprintf(line, sizeof line, "timing: %.1f ms\n", timing_ms);
    os << line;
  }
  return os.str();
}

std::string Report::to_json_text() const {
  nlohmann::json j;
  j["command"] = command;
  j["status"] = status;
  j["input"] = input;
  if (!method.empty()) j["method"] = method;
  if (n > 0) j["n"] = n;
  if (depth > 0) j["depth"] = depth;
  if (ambient_dim > 0) j["ambient_dim"] = ambient_dim;
  if (!gate_reason.empty()) j["gate_reason"] = gate_reason;
  if (!defects.empty()) j["defects"] = defects;
  if (!residuals.empty()) j["residuals"] = residuals;
  if (!blocks.empty()) {
    nlohmann::json rows = nlohmann::json::array();
    for (const BlockRow& row : blocks) {
      nlohmann::json r{{"subset", row.subset},
                       {"dim", row.dim},
                       {"classes", row.classes},
                       {"joint_reducing", row.joint_reducing},
                       {"span_orthogonality", row.span_orthogonality}};
      if (row.expected_dim) r["expected_dim"] = *row.expected_dim;
      rows.push_back(std::move(r));
    }
    j["blocks"] = std::move(rows);
  }
  if (!agreement.empty()) {
    nlohmann::json rows = nlohmann::json::array();
    for (const AgreementRow& row : agreement)
      rows.push_back(nlohmann::json{{"subset", row.subset},
                                    {"direct_dim", row.direct_dim},
                                    {"recursive_dim", row.recursive_dim},
                                    {"angle", row.angle}});
    j["agreement"] = std::move(rows);
  }
  if (!checks.empty()) {
    nlohmann::json rows = nlohmann::json::array();
    for (const CheckRow& row : checks)
      rows.push_back(nlohmann::json{{"name", row.name},
                                    {"pass", row.pass},
                                    {"value", row.value},
                                    {"note", row.note}});
    j["checks"] = std::move(rows);
  }
  if (!notes.empty()) {
    nlohmann::json obj = nlohmann::json::object();
    for (const auto& [key, value] : notes) obj[key] = value;
    j["notes"] = std::move(obj);
  }
  return j.dump(2) + "\n";
}

}  // namespace woldkit

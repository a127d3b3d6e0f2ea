#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "woldkit/types.hpp"

namespace woldkit {

struct BlockRow {
  std::string subset;
  Index dim = 0;
  std::string classes;  // one letter per coordinate: s, u or m
  double joint_reducing = 0.0;
  double span_orthogonality = 0.0;
  std::optional<Index> expected_dim;  // when an oracle was supplied
};

struct AgreementRow {
  std::string subset;
  Index direct_dim = 0;
  Index recursive_dim = 0;
  double angle = 0.0;
};

struct CheckRow {
  std::string name;
  bool pass = false;
  double value = 0.0;
  std::string note;
};

// Everything a command wants to tell the user, renderable as a fixed-width
// text table or as JSON. The JSON form deliberately omits timing so byte
//-identical reruns stay byte-identical.
struct Report {
  std::string command;
  std::string status;  // accepted | rejected | unresolved
  std::string input;
  std::string method;
  int n = 0;
  int depth = 0;
  Index ambient_dim = 0;
  std::string gate_reason;
  std::map<std::string, double> defects;
  std::map<std::string, double> residuals;
  std::vector<BlockRow> blocks;
  std::vector<AgreementRow> agreement;
  std::vector<CheckRow> checks;
  std::vector<std::pair<std::string, std::string>> notes;
  double timing_ms = 0.0;

  std::string to_text() const;
  std::string to_json_text() const;
};

}  // namespace woldkit

#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "blm/contract.hpp"
#include "blm/model.hpp"
#include "blm/properties.hpp"

namespace blm {

struct ChangeSet {
  std::set<std::string> added;
  std::set<std::string> removed;
  std::map<std::string, std::vector<std::string>> modified;  // index -> field deltas
  bool empty() const { return added.empty() && removed.empty() && modified.empty(); }
};

struct SetDelta {
  std::set<std::string> entered;
  std::set<std::string> left;
  bool empty() const { return entered.empty() && left.empty(); }
};

struct ImpactReport {
  ChangeSet changes;
  SetDelta cf, tf, af, naf;
  enum class Verdict { PropertiesPreserved, PropertiesChanged };
  Verdict verdict = Verdict::PropertiesPreserved;
};

struct AuditRecord {
  std::string timestamp;  // UTC ISO-8601
  std::string actor;
  std::string operation;
  std::string digest;
  std::string summary;
};

// Element-level diff keyed by qualified index; diff(a,b).added == diff(b,a).removed.
ChangeSet diff_models(const LogicModel& older, const LogicModel& newer);

// Re-evaluates both models under the contract and reports the set deltas.
ImpactReport impact(const LogicModel& older, const LogicModel& newer,
                    const Contract& contract);

// Append-only tab-separated log; one record per line.
class AuditLog {
public:
  explicit AuditLog(std::string path) : path_(std::move(path)) {}
  void append(const AuditRecord& record) const;  // throws IoError
  static std::vector<AuditRecord> read(const std::string& path);

private:
  std::string path_;
};

AuditRecord make_record(const std::string& actor, const std::string& operation,
                        const std::string& digest, const std::string& summary);

std::uint64_t fnv1a64(const std::string& bytes);
std::string digest_hex(const std::string& bytes);

// Stable digest of the model: hash of its property-free canonical schema bytes.
std::string model_digest(const LogicModel& model);

}  // namespace blm

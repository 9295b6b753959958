#include "axv/nlg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace axv {

std::string_view to_string(CertaintyBand band) {
  switch (band) {
    case CertaintyBand::High: return "High";
    case CertaintyBand::Medium: return "Medium";
    case CertaintyBand::Low: break;
  }
  return "Low";
}

CertaintyBand certainty_band(double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::domain_error("probability outside [0, 1]: " + std::to_string(p));
  if (p > kHighAbove) return CertaintyBand::High;
  if (p < kLowBelow) return CertaintyBand::Low;
  return CertaintyBand::Medium;
}

const std::string& PhrasingTable::lead_in(CertaintyBand band) const {
  switch (band) {
    case CertaintyBand::High: return high;
    case CertaintyBand::Medium: return medium;
    case CertaintyBand::Low: break;
  }
  return low;
}

const PhrasingTable& default_phrasing() {
  static const PhrasingTable table;
  return table;
}

std::string format_duration(double seconds) {
  if (!std::isfinite(seconds)) return "unknown";
  auto total = static_cast<long long>(std::llround(std::max(seconds, 0.0)));
  long long h = total / 3600;
  long long m = (total % 3600) / 60;
  long long s = total % 60;
  std::string out;
  auto part = [&](long long v, char unit) {
    if (v == 0) return;
    if (!out.empty()) out.push_back(' ');
    out += std::to_string(v);
    out.push_back(unit);
  };
  part(h, 'h');
  part(m, 'm');
  part(s, 's');
  return out.empty() ? "0s" : out;
}

std::string render_template(const TemplateText& t, const MissionState& state) {
  std::string out;
  for (const auto& seg : t.segments()) {
    if (const auto* lit = std::get_if<LiteralSegment>(&seg)) {
      out += lit->text;
    } else if (const auto* var = std::get_if<VarSlot>(&seg)) {
      const Value* v = state.var(var->name);
      out += v != nullptr ? format_value(*v) : "unknown";
    } else {
      out += format_duration(state.elapsed_since(std::get<ElapsedSlot>(seg).event_kind));
    }
  }
  return out;
}

namespace {

const PhrasingTable& table_of(const RealizeOptions& o) {
  return o.phrasing != nullptr ? *o.phrasing : default_phrasing();
}

std::string sentence(const std::string& lead, const std::string& body, double p, bool numbers) {
  std::string s = lead + " " + body;
  if (numbers) s += " (" + std::to_string(std::lround(p * 100.0)) + "%)";
  s += ".";
  return s;
}

const BehaviorSpec& behavior_of(const AutonomyModel& model, std::string_view id) {
  const BehaviorSpec* b = model.find(id);
  if (b == nullptr) throw UnknownBehaviorError(id);
  return *b;
}

}  // namespace

std::string realize_why(const WhyResult& result, const AutonomyModel& model,
                        std::string_view behavior, const MissionState& state,
                        const RealizeOptions& options) {
  const PhrasingTable& phr = table_of(options);
  if (result.reasons.empty()) return phr.refusal;
  const BehaviorSpec& spec = behavior_of(model, behavior);

  std::string out;
  for (std::size_t i = 0; i < result.reasons.size(); ++i) {
    const ScoredReason& r = result.reasons[i];
    const ReasonLeaf* leaf = find_reason_leaf(spec.tree, r.reason_id);
    if (leaf == nullptr)
      throw EngineError("reason '" + r.reason_id + "' not found in behavior '" + spec.id + "'");
    const std::string& lead = i == 0 ? phr.lead_in(certainty_band(r.probability)) : phr.additional;
    if (i != 0) out.push_back(' ');
    out += sentence(lead, render_template(leaf->text, state), r.probability, options.show_numbers);
  }
  return out;
}

std::string realize_why_not(const std::vector<ScoredBlocker>& blockers, const AutonomyModel& model,
                            std::string_view behavior, const MissionState& state,
                            const RealizeOptions& options) {
  const PhrasingTable& phr = table_of(options);
  if (blockers.empty()) return phr.nothing_blocks;
  const BehaviorSpec& spec = behavior_of(model, behavior);

  std::string out;
  for (std::size_t i = 0; i < blockers.size(); ++i) {
    const ScoredBlocker& b = blockers[i];
    if (b.guard_index >= spec.guards.size())
      throw EngineError("guard index out of range for behavior '" + spec.id + "'");
    std::string lead;
    if (i != 0) {
      lead = phr.additional;
    } else {
      CertaintyBand band = certainty_band(b.block_credence);
      lead = band == CertaintyBand::High ? phr.why_not : phr.lead_in(band);
    }
    if (i != 0) out.push_back(' ');
    out += sentence(lead, render_template(spec.guards[b.guard_index].explain, state),
                    b.block_credence, options.show_numbers);
  }
  return out;
}

}  // namespace axv

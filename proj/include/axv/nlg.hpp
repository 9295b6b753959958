#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "axv/engine.hpp"
#include "axv/model.hpp"
#include "axv/state.hpp"
#include "axv/template_text.hpp"

namespace axv {

enum class CertaintyBand { Low, Medium, High };

std::string_view to_string(CertaintyBand band);

inline constexpr double kHighAbove = 0.8;
inline constexpr double kLowBelow = 0.4;

/// High iff p > 0.8, Low iff p < 0.4, Medium otherwise (both breakpoints are
/// Medium). Throws std::domain_error for p outside [0, 1].
CertaintyBand certainty_band(double p);

/// Wording used when realizing answers. Deployments may re-skin it.
struct PhrasingTable {
  std::string high = "It is because";
  std::string medium = "It is likely because";
  std::string low = "It is possibly because";
  std::string additional = "It may also be that";
  std::string why_not = "It can't because";
  std::string refusal = "I am not confident enough to say.";
  std::string nothing_blocks = "No known constraint prevents it.";
  std::string cannot_explain = "I cannot explain that with my current model.";

  const std::string& lead_in(CertaintyBand band) const;
};

const PhrasingTable& default_phrasing();

/// "22m 30s" style; zero components omitted, "0s" for zero, "unknown" for +inf.
std::string format_duration(double seconds);

/// Fills `{var}` with the latest value ("unknown" when absent) and
/// `{elapsed_since(kind)}` with a formatted duration.
std::string render_template(const TemplateText& t, const MissionState& state);

struct RealizeOptions {
  bool show_numbers = false;
  const PhrasingTable* phrasing = nullptr;  // default_phrasing() when null
};

/// One sentence per reason in result order: the first led by its band
/// phrase, the rest by the additional-reason connective.
std::string realize_why(const WhyResult& result, const AutonomyModel& model,
                        std::string_view behavior, const MissionState& state,
                        const RealizeOptions& options = {});

std::string realize_why_not(const std::vector<ScoredBlocker>& blockers, const AutonomyModel& model,
                            std::string_view behavior, const MissionState& state,
                            const RealizeOptions& options = {});

}  // namespace axv

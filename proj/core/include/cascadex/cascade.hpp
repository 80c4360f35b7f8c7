#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cascadex/graph.hpp"

namespace cascadex {

using Window = std::int32_t;
inline constexpr Window kNever = -1;

/// Ground-truth referral category of a session.
enum class ReferralClass { Share, Facebook, External, Ad, Unknown };

std::string_view to_string(ReferralClass c) noexcept;

/// Maps a raw referrer column to a class. A referrer id marks a followed
/// share; "facebook" without one is generic Facebook traffic; named sites
/// other than the reserved words are external.
ReferralClass classify_referral(std::string_view referrer_class, ExternalId referrer_id);

struct SessionRow {
  ExternalId user_id = 0;
  std::int64_t time_login = 0;
  std::int64_t time_share = -1;
  ExternalId referrer_id = -1;
  std::string referrer_class;
  std::int64_t friend_count = 0;
  std::int64_t choice_id = 0;

  ReferralClass label() const { return classify_referral(referrer_class, referrer_id); }
};

struct SessionTable {
  std::vector<SessionRow> rows;
  bool has_labels = false;  // false for the minimal two-column form
};

/// Parses the seven-column session CSV
/// (user_id,time_login,time_share,referrer_id,referrer_class,friend_count,choice_id)
/// or the minimal (user_id,time_login) form. Times are minutes.
SessionTable load_sessions(const std::filesystem::path& path);
SessionTable parse_sessions(std::istream& in, const std::string& source = "<stream>");
void save_sessions(const SessionTable& table, const std::filesystem::path& path);

/// One activation cascade over the users of a graph, discretized into
/// windows of `window_width` minutes.
///
/// A user is active for its peers only from the window after its own
/// activation window; users tied in one window do not influence each other.
class Cascade {
 public:
  Cascade() = default;

  /// `minutes[i]` < 0 means user i never activated. `horizon` (number of
  /// windows) defaults to ceil((max minute + 1) / width) and is raised to
  /// that value if smaller.
  Cascade(std::vector<std::int64_t> minutes, double window_width,
          std::optional<std::size_t> horizon = std::nullopt,
          std::vector<ReferralClass> labels = {});

  std::size_t n_users() const noexcept { return minutes_.size(); }
  std::size_t horizon() const noexcept { return horizon_; }
  double window_width() const noexcept { return width_; }

  std::int64_t minutes(NodeIndex i) const noexcept { return minutes_[i]; }
  Window window(NodeIndex i) const noexcept { return windows_[i]; }
  std::span<const Window> windows() const noexcept { return windows_; }
  bool activated(NodeIndex i) const noexcept { return windows_[i] != kNever; }

  bool has_labels() const noexcept { return !labels_.empty(); }
  std::span<const ReferralClass> labels() const noexcept { return labels_; }

  /// Users whose activation window is t, in index order.
  std::span<const NodeIndex> activated_in(Window t) const noexcept {
    return {by_window_.data() + window_offsets_[static_cast<std::size_t>(t)],
            by_window_.data() + window_offsets_[static_cast<std::size_t>(t) + 1]};
  }
  /// Users inactive at t: activation window > t, or never.
  std::size_t n_inactive_at(Window t) const noexcept {
    return n_users() - window_offsets_[static_cast<std::size_t>(t) + 1];
  }
  std::size_t n_activated() const noexcept { return by_window_.size(); }

 private:
  std::vector<std::int64_t> minutes_;
  std::vector<Window> windows_;
  std::vector<ReferralClass> labels_;
  double width_ = 30.0;
  std::size_t horizon_ = 0;
  std::vector<NodeIndex> by_window_;
  std::vector<std::size_t> window_offsets_{0};
};

/// Builds a cascade over the graph's nodes: user ids are resolved through the
/// graph id map and graph nodes without a session never activate. Session
/// users unknown to the graph are an error; extend the graph first with
/// `SocialGraph::with_nodes`.
Cascade discretize(const SessionTable& sessions, double window_width, const SocialGraph& g,
                   std::optional<std::size_t> horizon = std::nullopt);

/// Same, with users indexed by row order.
Cascade discretize(const SessionTable& sessions, double window_width);

struct ActivityMasks {
  std::vector<std::uint8_t> active_before;  // window < t
  std::vector<std::uint8_t> activated_in;   // window == t
  std::vector<std::uint8_t> inactive;       // window > t or never
};

ActivityMasks activity_masks(const Cascade& c, Window t);

/// Permutation sorting users by (activation window, minutes, index) with
/// never-activated users last; `order[i]` is the new position of user i.
std::vector<NodeIndex> activation_order(const Cascade& c);

/// Applies a permutation from `activation_order` (or any other) to a cascade.
Cascade permute(const Cascade& c, std::span<const NodeIndex> new_index);

}  // namespace cascadex

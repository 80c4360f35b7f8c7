#include "cascadex/cascade.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <tuple>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "cascadex/error.hpp"

namespace cascadex {

std::string_view to_string(ReferralClass c) noexcept {
  switch (c) {
    case ReferralClass::Share: return "share";
    case ReferralClass::Facebook: return "facebook";
    case ReferralClass::External: return "external";
    case ReferralClass::Ad: return "ad";
    case ReferralClass::Unknown: return "unknown";
  }
  return "unknown";
}

ReferralClass classify_referral(std::string_view referrer_class, ExternalId referrer_id) {
  std::string lower(referrer_class);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (referrer_id >= 0 || lower == "share") return ReferralClass::Share;
  if (lower == "facebook") return ReferralClass::Facebook;
  if (lower == "ad" || lower == "ads") return ReferralClass::Ad;
  if (lower.empty() || lower == "unknown" || lower == "-1" || lower == "none") {
    return ReferralClass::Unknown;
  }
  return ReferralClass::External;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (char ch : line) {
    if (ch == '"') {
      quoted = !quoted;
    } else if (ch == ',' && !quoted) {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(std::move(cur));
  for (auto& f : out) {
    const auto b = f.find_first_not_of(" \t");
    const auto e = f.find_last_not_of(" \t");
    f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
  }
  return out;
}

std::int64_t parse_int(const std::string& field, const std::string& column, const std::string& source,
                       std::size_t line) {
  std::int64_t v = 0;
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    // Accept integral floats such as "4798.0".
    double d = 0;
    auto [dptr, dec] = std::from_chars(field.data(), end, d);
    if (dec == std::errc() && dptr == end && std::floor(d) == d) return static_cast<std::int64_t>(d);
    throw ParseError(source, line, "column '" + column + "': '" + field + "' is not numeric");
  }
  return v;
}

}  // namespace

SessionTable parse_sessions(std::istream& in, const std::string& source) {
  static const std::vector<std::string> kFull = {"user_id",        "time_login",   "time_share",
                                                 "referrer_id",    "referrer_class",
                                                 "friend_count",   "choice_id"};
  std::string line;
  std::size_t line_no = 0;
  // Skip blank lines ahead of the header.
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") != std::string::npos) break;
    line.clear();
  }
  if (line.empty()) throw SchemaError(source + ": missing header");

  const auto header = split_csv(line);
  std::unordered_map<std::string, std::size_t> col;
  for (std::size_t k = 0; k < header.size(); ++k) col[header[k]] = k;
  for (const char* required : {"user_id", "time_login"}) {
    if (!col.count(required)) {
      throw SchemaError(source + ": missing column '" + required + "'");
    }
  }
  SessionTable table;
  std::size_t present = 0;
  for (const auto& name : kFull) present += col.count(name);
  if (present != 2 && present != kFull.size()) {
    for (const auto& name : kFull) {
      if (!col.count(name)) throw SchemaError(source + ": missing column '" + name + "'");
    }
  }
  table.has_labels = present == kFull.size();

  std::unordered_set<ExternalId> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_csv(line);
    if (fields.size() != header.size()) {
      throw ParseError(source, line_no,
                       "expected " + std::to_string(header.size()) + " fields, found " +
                           std::to_string(fields.size()));
    }
    auto num = [&](const std::string& name) {
      return parse_int(fields[col.at(name)], name, source, line_no);
    };
    SessionRow row;
    row.user_id = num("user_id");
    row.time_login = num("time_login");
    if (row.time_login < 0) throw ParseError(source, line_no, "time_login must be >= 0");
    if (table.has_labels) {
      row.time_share = num("time_share");
      row.referrer_id = num("referrer_id");
      row.referrer_class = fields[col.at("referrer_class")];
      row.friend_count = num("friend_count");
      row.choice_id = num("choice_id");
    }
    if (!seen.insert(row.user_id).second) {
      throw ParseError(source, line_no, "duplicate user_id " + std::to_string(row.user_id));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

SessionTable load_sessions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open session file " + path.string());
  return parse_sessions(in, path.string());
}

void save_sessions(const SessionTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  if (!table.has_labels) {
    out << "user_id,time_login\n";
    for (const auto& r : table.rows) out << r.user_id << ',' << r.time_login << '\n';
    return;
  }
  out << "user_id,time_login,time_share,referrer_id,referrer_class,friend_count,choice_id\n";
  for (const auto& r : table.rows) {
    out << r.user_id << ',' << r.time_login << ',' << r.time_share << ',' << r.referrer_id << ','
        << r.referrer_class << ',' << r.friend_count << ',' << r.choice_id << '\n';
  }
}

Cascade::Cascade(std::vector<std::int64_t> minutes, double window_width,
                 std::optional<std::size_t> horizon, std::vector<ReferralClass> labels)
    : minutes_(std::move(minutes)), labels_(std::move(labels)), width_(window_width) {
  if (!(window_width > 0.0)) throw std::invalid_argument("Cascade: window width must be > 0");
  if (!labels_.empty() && labels_.size() != minutes_.size()) {
    throw std::invalid_argument("Cascade: label count differs from user count");
  }
  std::int64_t latest = -1;
  windows_.resize(minutes_.size());
  for (std::size_t i = 0; i < minutes_.size(); ++i) {
    if (minutes_[i] < 0) {
      minutes_[i] = -1;
      windows_[i] = kNever;
    } else {
      windows_[i] = static_cast<Window>(std::floor(static_cast<double>(minutes_[i]) / width_));
      latest = std::max(latest, minutes_[i]);
    }
  }
  const auto needed =
      latest < 0 ? std::size_t{1}
                 : static_cast<std::size_t>(std::ceil(static_cast<double>(latest + 1) / width_));
  horizon_ = std::max<std::size_t>({needed, horizon.value_or(0), 1});

  std::vector<std::size_t> count(horizon_ + 1, 0);
  for (Window w : windows_) {
    if (w != kNever) ++count[static_cast<std::size_t>(w) + 1];
  }
  window_offsets_.assign(horizon_ + 1, 0);
  for (std::size_t t = 0; t < horizon_; ++t) window_offsets_[t + 1] = window_offsets_[t] + count[t + 1];
  by_window_.resize(window_offsets_.back());
  std::vector<std::size_t> fill(window_offsets_.begin(), window_offsets_.end() - 1);
  for (std::size_t i = 0; i < windows_.size(); ++i) {
    if (windows_[i] != kNever) by_window_[fill[static_cast<std::size_t>(windows_[i])]++] = static_cast<NodeIndex>(i);
  }
}

Cascade discretize(const SessionTable& sessions, double window_width, const SocialGraph& g,
                   std::optional<std::size_t> horizon) {
  if (!(window_width > 0.0)) throw std::invalid_argument("discretize: window width must be > 0");
  std::vector<std::int64_t> minutes(g.n_nodes(), -1);
  std::vector<ReferralClass> labels;
  if (sessions.has_labels) labels.assign(g.n_nodes(), ReferralClass::Unknown);
  for (const auto& row : sessions.rows) {
    const auto idx = g.index_of(row.user_id);
    if (!idx) throw Error("discretize: user " + std::to_string(row.user_id) + " is not in the graph");
    minutes[*idx] = row.time_login;
    if (sessions.has_labels) labels[*idx] = row.label();
  }
  return Cascade(std::move(minutes), window_width, horizon, std::move(labels));
}

Cascade discretize(const SessionTable& sessions, double window_width) {
  std::vector<std::int64_t> minutes;
  std::vector<ReferralClass> labels;
  for (const auto& row : sessions.rows) {
    minutes.push_back(row.time_login);
    if (sessions.has_labels) labels.push_back(row.label());
  }
  return Cascade(std::move(minutes), window_width, std::nullopt, std::move(labels));
}

ActivityMasks activity_masks(const Cascade& c, Window t) {
  if (t < 0 || static_cast<std::size_t>(t) >= c.horizon()) {
    throw std::out_of_range("activity_masks: window " + std::to_string(t) + " outside [0, " +
                            std::to_string(c.horizon()) + ")");
  }
  ActivityMasks m;
  const std::size_t n = c.n_users();
  m.active_before.assign(n, 0);
  m.activated_in.assign(n, 0);
  m.inactive.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const Window w = c.window(static_cast<NodeIndex>(i));
    if (w == kNever || w > t) {
      m.inactive[i] = 1;
    } else if (w == t) {
      m.activated_in[i] = 1;
    } else {
      m.active_before[i] = 1;
    }
  }
  return m;
}

std::vector<NodeIndex> activation_order(const Cascade& c) {
  std::vector<NodeIndex> sorted(c.n_users());
  std::iota(sorted.begin(), sorted.end(), NodeIndex{0});
  auto key = [&](NodeIndex i) {
    const bool never = !c.activated(i);
    return std::tuple(never, c.window(i), c.minutes(i), i);
  };
  std::sort(sorted.begin(), sorted.end(), [&](NodeIndex a, NodeIndex b) { return key(a) < key(b); });
  std::vector<NodeIndex> new_index(c.n_users());
  for (std::size_t pos = 0; pos < sorted.size(); ++pos) new_index[sorted[pos]] = static_cast<NodeIndex>(pos);
  return new_index;
}

Cascade permute(const Cascade& c, std::span<const NodeIndex> new_index) {
  if (new_index.size() != c.n_users()) throw std::invalid_argument("permute: size mismatch");
  std::vector<std::int64_t> minutes(c.n_users());
  std::vector<ReferralClass> labels(c.has_labels() ? c.n_users() : 0);
  for (std::size_t i = 0; i < c.n_users(); ++i) {
    minutes[new_index[i]] = c.minutes(static_cast<NodeIndex>(i));
    if (c.has_labels()) labels[new_index[i]] = c.labels()[i];
  }
  return Cascade(std::move(minutes), c.window_width(), c.horizon(), std::move(labels));
}

}  // namespace cascadex

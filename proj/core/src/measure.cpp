#include "wmpredict/measure.hpp"

#include <algorithm>
#include <cctype>

#include "wmpredict/error.hpp"

namespace wmp {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

constexpr std::array<Stat, 3> kStatOrder = {Stat::Min, Stat::Max, Stat::Mean};

}  // namespace

bool MeasureId::valid() const {
  if (quantity == Quantity::FA || quantity == Quantity::MD) {
    return (tensor_index == 1 || tensor_index == 2) &&
           (stat == Stat::Min || stat == Stat::Max || stat == Stat::Mean);
  }
  return tensor_index == 0 && stat == Stat::None;
}

const std::array<MeasureId, 14>& MeasureId::all() {
  static const std::array<MeasureId, 14> ids = [] {
    std::array<MeasureId, 14> a{};
    std::size_t i = 0;
    for (Quantity q : {Quantity::FA, Quantity::MD}) {
      for (int t : {1, 2}) {
        for (Stat s : kStatOrder) a[i++] = MeasureId{q, t, s};
      }
    }
    a[i++] = MeasureId{Quantity::NumFibers, 0, Stat::None};
    a[i++] = MeasureId{Quantity::NumPoints, 0, Stat::None};
    return a;
  }();
  return ids;
}

int MeasureId::index() const {
  const auto& ids = all();
  auto it = std::find(ids.begin(), ids.end(), *this);
  if (it == ids.end()) throw ConfigError("invalid MeasureId");
  return static_cast<int>(it - ids.begin()) + 1;
}

MeasureId MeasureId::from_index(int index) {
  if (index < 1 || index > 14) {
    throw ConfigError("measure index out of range [1,14]: " + std::to_string(index));
  }
  return all()[static_cast<std::size_t>(index - 1)];
}

std::string MeasureId::name() const {
  switch (quantity) {
    case Quantity::NumFibers:
      return "Num_Fibers";
    case Quantity::NumPoints:
      return "Num_Points";
    default:
      break;
  }
  std::string out = quantity == Quantity::FA ? "FA" : "MD";
  out += std::to_string(tensor_index);
  out += '-';
  switch (stat) {
    case Stat::Min: out += "min"; break;
    case Stat::Max: out += "max"; break;
    case Stat::Mean: out += "mean"; break;
    case Stat::None: break;
  }
  return out;
}

std::optional<MeasureId> MeasureId::parse(std::string_view text) {
  const std::string t = lower(text);
  for (const MeasureId& id : all()) {
    if (lower(id.name()) == t) return id;
  }
  return std::nullopt;
}

std::vector<MeasureId> parse_measure_list(std::string_view text) {
  std::vector<MeasureId> out;
  if (lower(text) == "all") {
    out.assign(MeasureId::all().begin(), MeasureId::all().end());
    return out;
  }
  std::size_t start = 0;
  while (start <= text.size()) {
    auto pos = text.find(',', start);
    std::string_view item = text.substr(
        start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) {
      std::optional<MeasureId> id = MeasureId::parse(item);
      if (!id) {
        bool numeric = !item.empty() &&
                       std::all_of(item.begin(), item.end(),
                                   [](unsigned char c) { return std::isdigit(c); });
        if (numeric) id = MeasureId::from_index(std::stoi(std::string(item)));
      }
      if (!id) throw ConfigError("unknown measure: '" + std::string(item) + "'");
      if (std::find(out.begin(), out.end(), *id) != out.end()) {
        throw ConfigError("duplicate measure: '" + std::string(item) + "'");
      }
      out.push_back(*id);
    }
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  if (out.empty()) throw ConfigError("empty measure list");
  return out;
}

}  // namespace wmp

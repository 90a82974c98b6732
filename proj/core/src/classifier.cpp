#include "lifespec/classifier.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <thread>

namespace lifespec {

std::string_view to_string(SectorClass c) {
  switch (c) {
    case SectorClass::Null: return "null";
    case SectorClass::DcOnly: return "dc_only";
    case SectorClass::PowerLaw: return "power_law";
    case SectorClass::SharpPeaks: return "sharp_peaks";
    case SectorClass::WhiteNoise: return "white_noise";
  }
  return "?";
}

std::optional<SectorClass> parse_sector_class(std::string_view name) {
  for (auto c : kAllClasses)
    if (to_string(c) == name) return c;
  return std::nullopt;
}

ClassifierConfig ClassifierConfig::from(const spectral::AnalysisConfig& cfg) {
  return {cfg.fit_upper, cfg.beta_max, cfg.sigma2_max, cfg.peak_ratio, cfg.peaks_first};
}

Verdict judge(const spectral::SectorSpectrum& s, const ClassifierConfig& cfg) {
  Verdict v;
  if (s.all_zero()) return v;

  std::vector<double> positive;
  double max_power = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.frequency(i) == 0) continue;
    const double p = s.at(i);
    if (p > 0) {
      positive.push_back(p);
      if (p > max_power) {
        max_power = p;
        v.peak_bin = s.frequency(i);
      }
    }
  }
  if (positive.empty()) {
    v.cls = SectorClass::DcOnly;
    return v;
  }

  const auto mid = positive.begin() + static_cast<std::ptrdiff_t>(positive.size() / 2);
  std::nth_element(positive.begin(), mid, positive.end());
  double median = *mid;
  if (positive.size() % 2 == 0) median = (median + *std::max_element(positive.begin(), mid)) / 2;
  v.peak_ratio = max_power / median;

  try {
    v.fit = spectral::fit_power_law(s, 1, cfg.fit_upper);
  } catch (const spectral::SpectralError& e) {
    if (e.kind() != spectral::SpectralError::Kind::InsufficientSupport) throw;
  }
  const bool power_law = v.fit && v.fit->beta <= cfg.beta_max && v.fit->sigma2 <= cfg.sigma2_max;
  const bool peaks = max_power >= cfg.peak_ratio * median;

  if (cfg.peaks_first) {
    v.cls = peaks ? SectorClass::SharpPeaks : power_law ? SectorClass::PowerLaw : SectorClass::WhiteNoise;
  } else {
    v.cls = power_law ? SectorClass::PowerLaw : peaks ? SectorClass::SharpPeaks : SectorClass::WhiteNoise;
  }
  return v;
}

ClassMap classify_map(std::span<const spectral::SectorSpectrum> spectra, std::int64_t sectors_x,
                      std::int64_t sectors_y, const ClassifierConfig& cfg, unsigned workers) {
  if (sectors_x <= 0 || sectors_y <= 0) throw IncompleteGrid("sector grid must be non-empty");
  const auto n = static_cast<std::size_t>(sectors_x * sectors_y);
  std::vector<const spectral::SectorSpectrum*> slots(n, nullptr);
  for (const auto& s : spectra) {
    if (s.sector_x < 0 || s.sector_y < 0 || s.sector_x >= sectors_x || s.sector_y >= sectors_y)
      throw IncompleteGrid("sector " + std::to_string(s.sector_x) + "," + std::to_string(s.sector_y) +
                           " lies outside the grid");
    auto& slot = slots[static_cast<std::size_t>(s.sector_y * sectors_x + s.sector_x)];
    if (slot) throw IncompleteGrid("duplicate sector " + std::to_string(s.sector_x) + "," + std::to_string(s.sector_y));
    slot = &s;
  }
  if (spectra.size() != n)
    throw IncompleteGrid("expected " + std::to_string(n) + " sectors, got " + std::to_string(spectra.size()));

  ClassMap map;
  map.sectors_x = sectors_x;
  map.sectors_y = sectors_y;
  map.verdicts.resize(n);
  std::atomic<std::size_t> next{0};
  const auto body = [&] {
    for (std::size_t i = next++; i < n; i = next++) map.verdicts[i] = judge(*slots[i], cfg);
  };
  std::vector<std::thread> threads;
  for (unsigned w = 1; w < std::max(1u, workers); ++w) threads.emplace_back(body);
  body();
  for (auto& t : threads) t.join();
  for (const auto& v : map.verdicts) ++map.counts[static_cast<std::size_t>(v.cls)];
  return map;
}

std::string class_map_csv(const ClassMap& map) {
  std::string out = "sector_x,sector_y,class,beta,sigma2,peak_bin\n";
  for (std::int64_t sy = 0; sy < map.sectors_y; ++sy) {
    for (std::int64_t sx = 0; sx < map.sectors_x; ++sx) {
      const auto& v = map.verdicts[static_cast<std::size_t>(sy * map.sectors_x + sx)];
      out += std::to_string(sx) + ',' + std::to_string(sy) + ',' + std::string(to_string(v.cls)) + ',';
      if (v.fit) out += spectral::format_g9(v.fit->beta) + ',' + spectral::format_g9(v.fit->sigma2);
      else out += ',';
      out += ',';
      if (v.peak_bin) out += std::to_string(*v.peak_bin);
      out += '\n';
    }
  }
  return out;
}

namespace {

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
T parse_int(std::string_view s, const char* what) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw std::invalid_argument(std::string("class map CSV: bad ") + what + " '" + std::string(s) + "'");
  return v;
}

double parse_double(std::string_view s, const char* what) {
  const std::string tmp(s);
  char* end = nullptr;
  const double v = std::strtod(tmp.c_str(), &end);
  if (tmp.empty() || end != tmp.c_str() + tmp.size())
    throw std::invalid_argument(std::string("class map CSV: bad ") + what + " '" + tmp + "'");
  return v;
}

}  // namespace

ClassMap parse_class_map_csv(std::string_view text) {
  struct Row {
    std::int64_t sx, sy;
    Verdict v;
  };
  std::vector<Row> rows;
  std::size_t pos = 0;
  bool header = true;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (header) {
      if (line != "sector_x,sector_y,class,beta,sigma2,peak_bin")
        throw std::invalid_argument("class map CSV: unexpected header");
      header = false;
      continue;
    }
    const auto f = split_csv(line);
    if (f.size() != 6) throw std::invalid_argument("class map CSV: expected 6 fields");
    Row r{parse_int<std::int64_t>(f[0], "sector_x"), parse_int<std::int64_t>(f[1], "sector_y"), {}};
    const auto cls = parse_sector_class(f[2]);
    if (!cls) throw std::invalid_argument("class map CSV: unknown class '" + std::string(f[2]) + "'");
    r.v.cls = *cls;
    if (!f[3].empty()) {
      spectral::PowerLawFit fit;
      fit.beta = parse_double(f[3], "beta");
      fit.sigma2 = parse_double(f[4], "sigma2");
      r.v.fit = fit;
    }
    if (!f[5].empty()) r.v.peak_bin = parse_int<std::uint32_t>(f[5], "peak_bin");
    if (r.sx < 0 || r.sy < 0) throw std::invalid_argument("class map CSV: negative sector index");
    rows.push_back(r);
  }
  ClassMap map;
  for (const auto& r : rows) {
    map.sectors_x = std::max(map.sectors_x, r.sx + 1);
    map.sectors_y = std::max(map.sectors_y, r.sy + 1);
  }
  const auto n = static_cast<std::size_t>(map.sectors_x * map.sectors_y);
  if (rows.size() != n) throw IncompleteGrid("class map CSV does not cover a full sector grid");
  map.verdicts.resize(n);
  std::vector<bool> seen(n, false);
  for (const auto& r : rows) {
    const auto i = static_cast<std::size_t>(r.sy * map.sectors_x + r.sx);
    if (seen[i]) throw IncompleteGrid("class map CSV repeats a sector");
    seen[i] = true;
    map.verdicts[i] = r.v;
    ++map.counts[static_cast<std::size_t>(r.v.cls)];
  }
  return map;
}

}  // namespace lifespec

// analyze: pattern -> windowed simulation -> sector spectra -> class map.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <optional>
#include <sstream>

#include "cli.hpp"
#include "lifespec/analyzer.hpp"
#include "lifespec/classifier.hpp"
#include "lifespec/manifest.hpp"
#include "lifespec/pattern.hpp"
#include "lifespec/render.hpp"

namespace lifespec::cli {
namespace {

namespace fs = std::filesystem;
using spectral::AnalysisConfig;
using spectral::AnalysisMode;
using spectral::Roi;

// Best guess for the register-table region of Rendell's universal register
// machine, in pattern coordinates: 76 x 160 sectors of 50.
constexpr Roi kUrmRoi{50, 0, 3800, 8000};

struct AnalyzeArgs {
  std::string pattern;
  std::uint64_t window = 65536;
  std::int64_t sector = 50;
  std::string roi;
  std::int64_t margin = kDefaultMargin;
  std::string mode = "exact";
  std::uint64_t start_step = 0;
  std::uint32_t fit_upper = 0;  // 0: min(100, T/2 - 1)
  double beta_max = -0.2;
  double sigma2_max = 1.5;
  double peak_ratio = 50.0;
  std::vector<std::uint32_t> probe_periods{30, 60};
  bool peaks_first = false;
  std::uint64_t mem_limit = std::uint64_t{16} << 30;
  std::string out_dir = "lifespec-out";
  unsigned workers = default_workers();
  bool distinct_dc = false;
  int scale = 1;
  std::string spectra = "active";
  bool dry_run = false;
  bool quiet = false;
};

Roi parse_roi(const std::string& text, const Pattern& p, std::int64_t sector) {
  if (text.empty()) {
    const auto up = [&](std::int64_t v) { return std::max<std::int64_t>(1, (v + sector - 1) / sector) * sector; };
    return {0, 0, up(p.width), up(p.height)};
  }
  if (text == "urm") return kUrmRoi;
  Roi r;
  char c1 = 0, c2 = 0, c3 = 0;
  std::istringstream in(text);
  if (!(in >> r.x >> c1 >> r.y >> c2 >> r.width >> c3 >> r.height) || c1 != ',' || c2 != ',' || c3 != ',' ||
      !in.eof() || r.width <= 0 || r.height <= 0)
    throw UsageError("--roi expects x,y,w,h with w, h > 0, or 'urm' (got '" + text + "')");
  return r;
}

std::string roi_text(const Roi& r) {
  return std::to_string(r.x) + "," + std::to_string(r.y) + "," + std::to_string(r.width) + "," +
         std::to_string(r.height);
}

// Places the pattern so both it and the roi sit at least `margin` cells from
// the dead boundary. Returns the pattern origin in universe coordinates.
std::pair<std::int64_t, std::int64_t> build_universe(const Pattern& p, const Roi& roi, std::int64_t margin,
                                                     std::uint64_t budget, Universe& out) {
  const std::int64_t x0 = std::min<std::int64_t>(0, roi.x), y0 = std::min<std::int64_t>(0, roi.y);
  const std::int64_t x1 = std::max(p.width, roi.x + roi.width), y1 = std::max(p.height, roi.y + roi.height);
  const std::int64_t w = x1 - x0 + 2 * margin, h = y1 - y0 + 2 * margin;
  if (Universe::bytes_for(w, h) > budget)
    throw AllocationTooLarge("a " + std::to_string(w) + "x" + std::to_string(h) + " universe needs " +
                             std::to_string(Universe::bytes_for(w, h)) + " bytes, over the " + std::to_string(budget) +
                             " byte limit");
  out = Universe(w, h);
  const std::int64_t ox = margin - x0, oy = margin - y0;
  for (const auto& c : p.live_cells) out.set(c.x + ox, c.y + oy, true);
  return {ox, oy};
}

std::string fits_csv(const spectral::AnalysisResult& r) {
  std::string out = "sector_x,sector_y,alpha,beta,sigma2,fitted_bins\n";
  for (const auto& s : r.sectors) {
    if (!s.fit) continue;
    out += std::to_string(s.sector_x) + "," + std::to_string(s.sector_y) + "," + spectral::format_g9(s.fit->alpha) +
           "," + spectral::format_g9(s.fit->beta) + "," + spectral::format_g9(s.fit->sigma2) + "," +
           std::to_string(s.fit->fitted_bins) + "\n";
  }
  return out;
}

std::optional<spectral::PowerLawFit> try_fit(const spectral::SectorSpectrum& s, std::uint32_t f_u) {
  try {
    return spectral::fit_power_law(s, 1, f_u);
  } catch (const spectral::SpectralError& e) {
    if (e.kind() != spectral::SpectralError::Kind::InsufficientSupport) throw;
    return std::nullopt;
  }
}

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

std::string seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", s);
  return buf;
}

void run_analyze(const AnalyzeArgs& a) {
  Stopwatch clock;
  const std::string text = read_input(a.pattern);
  const Pattern pattern = parse_rle(text);
  if (a.sector <= 0) throw UsageError("--sector must be positive");

  AnalysisConfig cfg;
  cfg.window = a.window;
  cfg.fit_upper = a.fit_upper ? a.fit_upper
                              : static_cast<std::uint32_t>(std::clamp<std::uint64_t>(a.window / 2, 2, 101) - 1);
  cfg.sector_size = a.sector;
  cfg.start_step = a.start_step;
  cfg.beta_max = a.beta_max;
  cfg.sigma2_max = a.sigma2_max;
  cfg.peak_ratio = a.peak_ratio;
  cfg.probe_periods = a.probe_periods;
  cfg.mode = a.mode == "probe" ? AnalysisMode::Probe : AnalysisMode::Exact;
  cfg.peaks_first = a.peaks_first;

  const Roi pattern_roi = parse_roi(a.roi, pattern, a.sector);
  Universe universe;
  const auto [ox, oy] = build_universe(pattern, pattern_roi, a.margin, a.mem_limit, universe);
  cfg.roi = {pattern_roi.x + ox, pattern_roi.y + oy, pattern_roi.width, pattern_roi.height};
  cfg.validate();

  spectral::AnalyzeOptions opts;
  opts.workers = a.workers;
  opts.memory_limit = a.mem_limit;
  const auto started = std::chrono::steady_clock::now();
  if (!a.quiet)
    opts.progress = [started](std::uint64_t done, std::uint64_t total) {
      const double el = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
      const double eta = done ? el * static_cast<double>(total - done) / static_cast<double>(done) : 0.0;
      std::fprintf(stderr, "step %llu/%llu  %5.1f%%  elapsed %.1fs  eta %.1fs\n", (unsigned long long)done,
                   (unsigned long long)total, 100.0 * static_cast<double>(done) / static_cast<double>(total), el, eta);
    };
  const double load_s = clock.lap();

  if (a.dry_run) {
    const auto changed = spectral::count_changed_cells(universe, cfg, opts);
    const auto per = cfg.bytes_per_changed_cell();
    std::printf("universe %lldx%lld (%llu bytes)\nsectors %lld x %lld\nchanged cells %llu\n"
                "series memory %llu bytes (%llu per cell), limit %llu\n",
                (long long)universe.width(), (long long)universe.height(),
                (unsigned long long)Universe::bytes_for(universe.width(), universe.height()),
                (long long)cfg.sectors_x(), (long long)cfg.sectors_y(), (unsigned long long)changed,
                (unsigned long long)(changed * per), (unsigned long long)per, (unsigned long long)a.mem_limit);
    return;
  }

  const auto result = spectral::analyze(universe, cfg, opts);
  const double analyze_s = clock.lap();
  if (!result.boundary_contacts.empty())
    std::fprintf(stderr,
                 "warning: live cells reached the universe boundary after %zu generations (first at %llu); "
                 "results near the edge are unreliable, raise --margin\n",
                 result.boundary_contacts.size(), (unsigned long long)result.boundary_contacts.front());

  const auto ccfg = ClassifierConfig::from(cfg);
  const auto map = classify_map(result.sectors, result.sectors_x, result.sectors_y, ccfg, a.workers);
  const auto average = spectral::average_spectrum(result.sectors);
  const auto average_fit = try_fit(average, cfg.fit_upper);
  const double classify_s = clock.lap();

  const fs::path dir = a.out_dir;
  std::vector<fs::path> outputs;
  const auto emit = [&](const fs::path& rel, const std::string& bytes) {
    write_file(dir / rel, bytes);
    outputs.push_back(dir / rel);
  };
  emit("class_map.csv", class_map_csv(map));
  emit("fits.csv", fits_csv(result));
  emit("map.pgm", render::render_map(map, a.distinct_dc ? render::Palette::distinct_dc() : render::Palette{},
                                     a.scale));
  emit("average_spectrum.csv", spectral::spectrum_csv(average));
  {
    std::string fit = "alpha,beta,sigma2,fitted_bins\n";
    if (average_fit)
      fit += spectral::format_g9(average_fit->alpha) + "," + spectral::format_g9(average_fit->beta) + "," +
             spectral::format_g9(average_fit->sigma2) + "," + std::to_string(average_fit->fitted_bins) + "\n";
    emit("average_fit.csv", fit);
  }
  if (!average.all_zero()) {
    render::PlotOptions po;
    po.fit_upper = cfg.fit_upper;
    emit("average_spectrum.svg", render::render_spectrum(average, average_fit, po));
  }
  if (a.spectra != "none") {
    for (std::size_t k = 0; k < result.sectors.size(); ++k) {
      const auto& s = result.sectors[k];
      if (a.spectra == "active" && map.verdicts[k].cls == SectorClass::Null) continue;
      emit(fs::path("spectra") / ("sector_" + std::to_string(s.sector_x) + "_" + std::to_string(s.sector_y) + ".csv"),
           spectral::spectrum_csv(s));
    }
  }
  const double write_s = clock.lap();

  RunManifest m;
  m.set("input.pattern", a.pattern);
  m.set("input.sha256", sha256_hex(text));
  m.set("input.size", std::to_string(pattern.width) + "x" + std::to_string(pattern.height));
  m.set("engine.version", std::string(kEngineVersion));
  m.set("config.window", std::to_string(cfg.window));
  m.set("config.fit_upper", std::to_string(cfg.fit_upper));
  m.set("config.sector", std::to_string(cfg.sector_size));
  m.set("config.roi", roi_text(pattern_roi));
  m.set("config.margin", std::to_string(a.margin));
  m.set("config.universe_roi", roi_text(cfg.roi));
  m.set("config.universe_size", std::to_string(universe.width()) + "x" + std::to_string(universe.height()));
  m.set("config.start_step", std::to_string(cfg.start_step));
  m.set("config.mode", spectral::to_string(cfg.mode));
  m.set("config.beta_max", exact(cfg.beta_max));
  m.set("config.sigma2_max", exact(cfg.sigma2_max));
  m.set("config.peak_ratio", exact(cfg.peak_ratio));
  std::string periods;
  for (auto p : cfg.probe_periods) periods += (periods.empty() ? "" : ",") + std::to_string(p);
  m.set("config.probe_periods", periods);
  m.set("config.peaks_first", cfg.peaks_first ? "true" : "false");
  m.set("config.mem_limit", std::to_string(a.mem_limit));
  m.set("config.distinct_dc", a.distinct_dc ? "true" : "false");
  m.set("config.scale", std::to_string(a.scale));
  m.set("config.spectra", a.spectra);
  m.set("config.rerun", "lifespec analyze --pattern " + a.pattern + " --T " + std::to_string(cfg.window) +
                            " --fit-upper " + std::to_string(cfg.fit_upper) + " --sector " +
                            std::to_string(cfg.sector_size) + " --roi " + roi_text(pattern_roi) + " --margin " +
                            std::to_string(a.margin) + " --start-step " + std::to_string(cfg.start_step) + " --mode " +
                            spectral::to_string(cfg.mode) + " --beta-max " + exact(cfg.beta_max) + " --sigma2-max " +
                            exact(cfg.sigma2_max) + " --peak-ratio " + exact(cfg.peak_ratio) + " --probe-periods " +
                            periods + (cfg.peaks_first ? " --peaks-first" : "") + " --mem-limit " +
                            std::to_string(a.mem_limit) + (a.distinct_dc ? " --distinct-dc" : "") + " --scale " +
                            std::to_string(a.scale) + " --spectra " + a.spectra);
  m.set("run.workers", std::to_string(a.workers));
  m.set("time.load_s", seconds(load_s));
  m.set("time.analyze_s", seconds(analyze_s));
  m.set("time.classify_s", seconds(classify_s));
  m.set("time.write_s", seconds(write_s));
  m.set("result.sectors", std::to_string(result.sectors_x) + "x" + std::to_string(result.sectors_y));
  m.set("result.changed_cells", std::to_string(result.changed_cells));
  m.set("result.boundary_contacts", std::to_string(result.boundary_contacts.size()));
  for (auto c : kAllClasses) m.set("result.count." + std::string(to_string(c)), std::to_string(map.count(c)));
  if (average_fit) {
    m.set("result.average_beta", exact(average_fit->beta));
    m.set("result.average_sigma2", exact(average_fit->sigma2));
  }
  for (const auto& p : outputs) m.add_output(p, dir);
  write_file(dir / "manifest.txt", m.to_text());

  std::printf("sectors %lld x %lld, changed cells %llu\n", (long long)result.sectors_x, (long long)result.sectors_y,
              (unsigned long long)result.changed_cells);
  for (auto c : kAllClasses)
    std::printf("%-11s %llu\n", std::string(to_string(c)).c_str(), (unsigned long long)map.count(c));
  if (average_fit)
    std::printf("average spectrum: beta %.4f  sigma2 %.4f  (%zu bins)\n", average_fit->beta, average_fit->sigma2,
                average_fit->fitted_bins);
  else
    std::printf("average spectrum: no fit (fewer than two positive bins in [1, %u])\n", cfg.fit_upper);
  std::printf("wrote %zu files to %s\n", outputs.size() + 1, dir.string().c_str());
}

}  // namespace

void add_analyze(CLI::App& app) {
  auto a = std::make_shared<AnalyzeArgs>();
  auto* sub = app.add_subcommand("analyze", "Simulate a pattern and classify the spectra of its sectors");
  sub->add_option("--pattern", a->pattern, "RLE pattern file")->required();
  sub->add_option("--T", a->window, "Window length in generations")->capture_default_str();
  sub->add_option("--sector", a->sector, "Sector edge length in cells")->capture_default_str();
  sub->add_option("--roi", a->roi,
                  "Analyzed region x,y,w,h in pattern coordinates, or 'urm' "
                  "(default: the pattern rounded up to whole sectors)");
  sub->add_option("--margin", a->margin, "Dead cells around pattern and region")->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--mode", a->mode, "exact: full spectrum; probe: f_u bins plus gun harmonics")
      ->check(CLI::IsMember({"exact", "probe"}))
      ->capture_default_str();
  sub->add_option("--start-step", a->start_step, "Generations discarded before the window")->capture_default_str();
  sub->add_option("--fit-upper", a->fit_upper, "Upper fit frequency f_u (default min(100, T/2 - 1))");
  sub->add_option("--beta-max", a->beta_max, "Shallowest slope that counts as a power law")->capture_default_str();
  sub->add_option("--sigma2-max", a->sigma2_max, "Largest residual for a power law")->capture_default_str();
  sub->add_option("--peak-ratio", a->peak_ratio, "Peak to median ratio for sharp peaks")->capture_default_str();
  sub->add_option("--probe-periods", a->probe_periods, "Periods whose harmonics probe mode evaluates")
      ->delimiter(',')
      ->capture_default_str();
  sub->add_flag("--peaks-first", a->peaks_first, "Test sharp peaks before the power law");
  sub->add_option("--mem-limit", a->mem_limit, "Memory budget (bytes; k, M, G suffixes)")
      ->transform(CLI::AsSizeValue(false))
      ->capture_default_str();
  sub->add_option("--out-dir", a->out_dir, "Output directory")->capture_default_str();
  sub->add_option("--workers", a->workers, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_flag("--distinct-dc", a->distinct_dc, "Give DC-only sectors their own gray in map.pgm");
  sub->add_option("--scale", a->scale, "Pixels per sector in map.pgm")->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--spectra", a->spectra, "Per-sector spectrum files: active, all or none")
      ->check(CLI::IsMember({"active", "all", "none"}))
      ->capture_default_str();
  sub->add_flag("--dry-run", a->dry_run, "Count changed cells and report memory use, write nothing");
  sub->add_flag("-q,--quiet", a->quiet, "No progress lines");
  sub->callback([a] { run_analyze(*a); });
}

}  // namespace lifespec::cli

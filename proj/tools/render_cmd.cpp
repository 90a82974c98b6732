// render: class-map CSV -> PGM, spectrum CSV -> SVG.

#include <filesystem>
#include <memory>
#include <optional>

#include "cli.hpp"
#include "lifespec/classifier.hpp"
#include "lifespec/manifest.hpp"
#include "lifespec/render.hpp"

namespace lifespec::cli {
namespace {

struct RenderArgs {
  std::string class_map;
  std::string spectrum;
  std::string out;
  int scale = 1;
  bool distinct_dc = false;
  bool linear = false;
  bool no_fit = false;
  std::uint32_t fit_upper = 100;
  std::uint64_t window = 0;
};

void run_render(const RenderArgs& a) {
  namespace fs = std::filesystem;
  if (!a.class_map.empty()) {
    const auto map = parse_class_map_csv(read_input(a.class_map));
    const auto out = a.out.empty() ? fs::path(a.class_map).replace_extension(".pgm") : fs::path(a.out);
    write_file(out, render::render_map(map, a.distinct_dc ? render::Palette::distinct_dc() : render::Palette{},
                                       a.scale));
    std::printf("%s\n", out.string().c_str());
    return;
  }
  const auto s = spectral::parse_spectrum_csv(read_input(a.spectrum), a.window);
  std::optional<spectral::PowerLawFit> fit;
  if (!a.no_fit) {
    try {
      fit = spectral::fit_power_law(s, 1, a.fit_upper);
    } catch (const spectral::SpectralError& e) {
      if (e.kind() != spectral::SpectralError::Kind::InsufficientSupport) throw;
    }
  }
  render::PlotOptions po;
  po.linear_x = a.linear;
  po.fit_upper = a.fit_upper;
  const auto out = a.out.empty() ? fs::path(a.spectrum).replace_extension(".svg") : fs::path(a.out);
  write_file(out, render::render_spectrum(s, fit, po));
  std::printf("%s\n", out.string().c_str());
  if (fit) std::printf("beta %.4f  sigma2 %.4f  (%zu bins)\n", fit->beta, fit->sigma2, fit->fitted_bins);
}

}  // namespace

void add_render(CLI::App& app) {
  auto a = std::make_shared<RenderArgs>();
  auto* sub = app.add_subcommand("render", "Draw a class map as PGM or a spectrum as SVG");
  auto* cm = sub->add_option("--class-map", a->class_map, "class_map.csv written by analyze");
  auto* sp = sub->add_option("--spectrum", a->spectrum, "Spectrum CSV (f,S) written by analyze");
  cm->excludes(sp);
  sub->add_option("-o,--out", a->out, "Output file (default: input with .pgm or .svg)");
  sub->add_option("--scale", a->scale, "Pixels per sector")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_flag("--distinct-dc", a->distinct_dc, "Give DC-only sectors their own gray");
  sub->add_flag("--linear", a->linear, "Linear frequency axis");
  sub->add_flag("--no-fit", a->no_fit, "Leave out the power-law fit line");
  sub->add_option("--fit-upper", a->fit_upper, "Upper fit frequency f_u")->capture_default_str();
  sub->add_option("--T", a->window, "Window length (default: twice the highest bin)");
  sub->callback([a, cm, sp] {
    if (cm->empty() && sp->empty()) throw UsageError("render needs --class-map or --spectrum");
    run_render(*a);
  });
}

}  // namespace lifespec::cli

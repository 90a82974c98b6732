#include "lifespec/pattern.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <limits>

namespace lifespec {
namespace {

constexpr std::size_t kMaxLine = 70;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void header_error(const std::string& why) {
  throw RleError(RleError::Kind::MalformedHeader, "malformed RLE header: " + why);
}

std::int64_t parse_dimension(std::string_view value, char key) {
  value = trim(value);
  std::int64_t out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size() || out < 0)
    header_error(std::string("invalid value for ") + key);
  return out;
}

struct Header {
  std::int64_t width = 0;
  std::int64_t height = 0;
  std::string rule{kLifeRule};
};

Header parse_header(std::string_view line, const RleOptions& options) {
  Header h;
  bool have_x = false, have_y = false, have_rule = false;
  std::size_t field = 0;
  while (!line.empty()) {
    const auto comma = line.find(',');
    std::string_view item = line.substr(0, comma);
    line = comma == std::string_view::npos ? std::string_view{} : line.substr(comma + 1);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) header_error("expected key = value");
    const auto key = trim(item.substr(0, eq));
    const auto value = item.substr(eq + 1);
    if (field == 0 && key == "x") {
      h.width = parse_dimension(value, 'x');
      have_x = true;
    } else if (field == 1 && key == "y") {
      h.height = parse_dimension(value, 'y');
      have_y = true;
    } else if (field == 2 && key == "rule") {
      h.rule = std::string(trim(value));
      have_rule = true;
    } else {
      header_error("unexpected field '" + std::string(key) + "'");
    }
    ++field;
  }
  if (!have_x || !have_y) header_error("missing x or y");
  if (have_rule) {
    auto normalized = normalize_rule(h.rule);
    if (normalized != kLifeRule && !options.permissive_rule)
      throw RleError(RleError::Kind::UnsupportedRule, "unsupported rule '" + h.rule + "'");
    h.rule = std::move(normalized);
  }
  return h;
}

void append_run(std::string& body, std::size_t& line_len, std::int64_t count, char tag) {
  std::string token;
  if (count > 1) token = std::to_string(count);
  token.push_back(tag);
  if (line_len + token.size() > kMaxLine) {
    body.push_back('\n');
    line_len = 0;
  }
  body += token;
  line_len += token.size();
}

}  // namespace

std::string normalize_rule(std::string_view rule) {
  std::string r;
  for (char c : trim(rule)) r.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  if (r == "B3/S23" || r == "S23/B3" || r == "23/3") return std::string(kLifeRule);
  return std::string(trim(rule));
}

Pattern parse_rle(std::string_view text, const RleOptions& options) {
  // Header: first line that is neither blank nor a comment.
  std::size_t pos = 0;
  std::string_view header_line;
  bool found = false;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    header_line = t;
    found = true;
    break;
  }
  if (!found) header_error("no header line");
  const Header header = parse_header(header_line, options);

  Pattern p;
  p.width = header.width;
  p.height = header.height;
  p.rule = header.rule;

  std::int64_t x = 0, y = 0;
  std::int64_t count = 0;
  bool have_count = false;
  bool line_start = true;
  const auto overflow = [&](const char* what) {
    throw RleError(RleError::Kind::RunOverflow,
                   std::string("RLE run overflows declared size: ") + what + " at row " + std::to_string(y));
  };

  for (; pos < text.size(); ++pos) {
    const char c = text[pos];
    if (c == '\n') {
      line_start = true;
      continue;
    }
    if (line_start && c == '#') {
      while (pos < text.size() && text[pos] != '\n') ++pos;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') continue;
    line_start = false;
    if (c >= '0' && c <= '9') {
      if (count > (std::numeric_limits<std::int64_t>::max() - 9) / 10) overflow("run count");
      count = count * 10 + (c - '0');
      have_count = true;
      continue;
    }
    const std::int64_t n = have_count ? count : 1;
    count = 0;
    have_count = false;
    if (c == '!') break;
    if (c == 'b' || c == 'o') {
      if (n == 0) continue;
      if (y >= p.height) overflow("too many rows");
      if (n > p.width - x) overflow("row longer than width");
      if (c == 'o')
        for (std::int64_t i = 0; i < n; ++i) p.live_cells.push_back({x + i, y});
      x += n;
    } else if (c == '$') {
      if (n > p.height - y) overflow("too many rows");
      y += n;
      x = 0;
    } else {
      throw RleError(RleError::Kind::UnexpectedSymbol,
                     std::string("unexpected symbol '") + c + "' in RLE body");
    }
  }
  // Runs are emitted in row-major order already, and each cell once.
  return p;
}

std::string write_rle(const Pattern& pattern) {
  std::vector<Cell> cells = pattern.live_cells;
  std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
    return a.y != b.y ? a.y < b.y : a.x < b.x;
  });
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());

  std::string out = "x = " + std::to_string(pattern.width) + ", y = " + std::to_string(pattern.height) +
                    ", rule = " + pattern.rule + "\n";
  if (cells.empty()) return out + "b!";

  std::string body;
  std::size_t line_len = 0;
  std::int64_t cur_y = 0;
  std::size_t i = 0;
  while (i < cells.size()) {
    const std::int64_t row = cells[i].y;
    if (row > cur_y) append_run(body, line_len, row - cur_y, '$');
    cur_y = row;
    std::int64_t x = 0;
    while (i < cells.size() && cells[i].y == row) {
      const std::int64_t start = cells[i].x;
      std::int64_t end = start + 1;
      ++i;
      while (i < cells.size() && cells[i].y == row && cells[i].x == end) {
        ++end;
        ++i;
      }
      if (start > x) append_run(body, line_len, start - x, 'b');
      append_run(body, line_len, end - start, 'o');
      x = end;
    }
  }
  if (line_len + 1 > kMaxLine) body.push_back('\n');
  body += "!";
  return out + body;
}

Universe place(const Pattern& pattern, std::int64_t margin, std::uint64_t max_bytes) {
  if (margin < 0) throw std::invalid_argument("margin must be non-negative");
  const std::int64_t w = pattern.width + 2 * margin;
  const std::int64_t h = pattern.height + 2 * margin;
  const auto bytes = Universe::bytes_for(w, h);
  if (bytes > max_bytes)
    throw AllocationTooLarge("universe of " + std::to_string(w) + "x" + std::to_string(h) + " needs " +
                             std::to_string(bytes) + " bytes, budget is " + std::to_string(max_bytes));
  Universe u(w, h);
  for (const auto& c : pattern.live_cells) u.set(c.x + margin, c.y + margin, true);
  return u;
}

Pattern extract(const Universe& universe) {
  Pattern p;
  p.width = universe.width();
  p.height = universe.height();
  for (std::int64_t y = 0; y < universe.height(); ++y) {
    auto row = universe.row(y);
    for (std::size_t j = 0; j < row.size(); ++j) {
      std::uint64_t w = row[j];
      while (w) {
        const int b = std::countr_zero(w);
        p.live_cells.push_back({static_cast<std::int64_t>(j * 64 + b), y});
        w &= w - 1;
      }
    }
  }
  return p;
}

}  // namespace lifespec

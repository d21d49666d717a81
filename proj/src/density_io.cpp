#include "rankone/density_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "json.hpp"

namespace rankone {

std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string density_to_csv(const SampledDensity& d) {
  std::string out;
  out.reserve(d.values.size() * 24 + 16);
  bool flat = d.ny <= 1;
  out += flat ? "tau,value\n" : "tau1,tau2,value\n";
  for (std::size_t j = 0; j < d.ny; ++j) {
    for (std::size_t i = 0; i < d.nx; ++i) {
      out += format_double(d.tau1(i));
      if (!flat) {
        out += ',';
        out += format_double(d.tau2(j));
      }
      out += ',';
      out += format_double(d.values[j * d.nx + i]);
      out += '\n';
    }
  }
  return out;
}

std::vector<double> density_values_from_csv(const std::string& text) {
  std::vector<double> vals;
  std::size_t pos = text.find('\n');
  if (pos == std::string::npos) throw ConfigError("csv: missing header");
  ++pos;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::size_t comma = text.rfind(',', eol);
    if (comma == std::string::npos || comma < pos) {
      throw ConfigError("csv: malformed row");
    }
    double v = 0.0;
    auto res = std::from_chars(text.data() + comma + 1, text.data() + eol, v);
    if (res.ec != std::errc() || res.ptr != text.data() + eol) {
      throw ConfigError("csv: bad value field");
    }
    vals.push_back(v);
    pos = eol + 1;
  }
  return vals;
}

PgmRender render_density_pgm(const SampledDensity& d) {
  if (d.values.empty()) throw std::invalid_argument("pgm: empty density");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  std::vector<double> logs(d.values.size());
  for (std::size_t k = 0; k < d.values.size(); ++k) {
    double v = std::log10(d.values[k] + 1e-12);
    logs[k] = v;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  PgmRender out;
  out.pgm = "P5\n" + std::to_string(d.nx) + " " + std::to_string(d.ny) +
            "\n65535\n";
  out.pgm.reserve(out.pgm.size() + 2 * d.values.size());
  double span = hi - lo;
  for (std::size_t j = 0; j < d.ny; ++j) {
    // PGM rows run top to bottom; emit high tau2 first
    std::size_t row = d.ny - 1 - j;
    for (std::size_t i = 0; i < d.nx; ++i) {
      double v = logs[row * d.nx + i];
      std::uint16_t pix =
          span > 0.0
              ? std::uint16_t(std::lround((v - lo) / span * 65535.0))
              : std::uint16_t(32768);
      out.pgm += char(pix >> 8);
      out.pgm += char(pix & 0xff);
    }
  }
  nlohmann::json side;
  side["min"] = lo;
  side["max"] = hi;
  out.sidecarJson = side.dump();
  return out;
}

}  // namespace rankone

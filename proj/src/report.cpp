#include "minpred/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "minpred/errors.hpp"

namespace minpred {

namespace {

std::string format_number(double v, int precision = 4) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*f", precision, v);
  return buffer;
}

std::string pad(const std::string& s, std::size_t width) {
  if (s.size() >= width) return s;
  return s + std::string(width - s.size(), ' ');
}

std::string render_matrix_table(const std::vector<double>& values,
                                std::size_t rows, std::size_t cols,
                                const std::vector<std::string>& row_names,
                                const std::vector<std::string>& col_names) {
  std::size_t name_width = 6;
  for (const auto& n : row_names) name_width = std::max(name_width, n.size());
  std::size_t cell_width = 9;
  for (const auto& n : col_names) cell_width = std::max(cell_width, n.size());

  std::ostringstream out;
  out << pad("", name_width + 2);
  for (const auto& n : col_names) out << pad(n, cell_width + 2);
  out << '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    out << pad(row_names[r], name_width + 2);
    for (std::size_t c = 0; c < cols; ++c) {
      out << pad(format_number(values[r * cols + c]), cell_width + 2);
    }
    out << '\n';
  }
  return out.str();
}

std::string render_strength_table(const ResultsDocument& doc) {
  const StrengthMatrix m = strength_matrix_from_body(doc.body);
  const std::size_t rows = m.n_real + m.n_fake;
  std::vector<std::string> col_names(m.names.begin(),
                                     m.names.begin() + m.n_real);
  std::ostringstream out;
  out << "predictive strength (nats), source rows -> target columns\n\n";
  out << render_matrix_table(m.raw, rows, m.n_real, m.names, col_names);
  if (m.threshold.has_value()) {
    out << "\nsignificance threshold: " << format_number(*m.threshold, 6)
        << "\n\nthresholded matrix\n\n";
    out << render_matrix_table(m.thresholded, m.n_real, m.n_real, col_names,
                               col_names);
  }
  bool any_capped = false;
  for (auto c : m.capped) any_capped |= c != 0;
  if (any_capped) {
    out << "\nnote: entries marked at the amplitude floor are capped "
           "bound values\n";
  }
  return out.str();
}

std::string render_benchmark_table(const ResultsDocument& doc) {
  const Json& aggregates = doc.body.at("aggregates");
  std::set<std::size_t> n_values;
  std::vector<std::string> methods;
  std::map<std::pair<std::string, std::size_t>, std::pair<double, double>>
      pr_cells, roc_cells;
  for (const auto& a : aggregates) {
    const std::string method = a.at("method").get<std::string>();
    const std::size_t n = a.at("n").get<std::size_t>();
    n_values.insert(n);
    if (std::find(methods.begin(), methods.end(), method) == methods.end()) {
      methods.push_back(method);
    }
    pr_cells[{method, n}] = {a.at("mean_auc_pr").get<double>(),
                             a.at("sd_auc_pr").get<double>()};
    roc_cells[{method, n}] = {a.at("mean_auc_roc").get<double>(),
                              a.at("sd_auc_roc").get<double>()};
  }

  auto render_metric =
      [&](const std::string& title,
          std::map<std::pair<std::string, std::size_t>,
                   std::pair<double, double>>& cells) {
        std::ostringstream out;
        out << title << " (%) as mean+/-std over dataset seeds\n\n";
        std::size_t name_width = 8;
        for (const auto& m : methods) {
          name_width = std::max(name_width, m.size());
        }
        out << pad("method \\ N", name_width + 2);
        for (std::size_t n : n_values) {
          out << pad(std::to_string(n), 14);
        }
        out << '\n';
        for (const auto& m : methods) {
          out << pad(m, name_width + 2);
          for (std::size_t n : n_values) {
            const auto it = cells.find({m, n});
            if (it == cells.end()) {
              out << pad("-", 14);
            } else {
              out << pad(format_number(100.0 * it->second.first, 1) + "+/-" +
                             format_number(100.0 * it->second.second, 1),
                         14);
            }
          }
          out << '\n';
        }
        return out.str();
      };

  std::string text = render_metric("AUC-PR", pr_cells);
  text += '\n';
  text += render_metric("AUC-ROC", roc_cells);

  std::size_t failures = 0;
  for (const auto& c : doc.body.at("cells")) {
    if (!c.at("ok").get<bool>()) ++failures;
  }
  if (failures > 0) {
    text += "\nfailed cells: " + std::to_string(failures) + "\n";
  }
  return text;
}

std::string render_lambda_table(const ResultsDocument& doc) {
  std::ostringstream out;
  out << "lambda selection: 4-sigma separation of known-causal vs permuted "
         "strengths\n\n";
  out << pad("lambda", 12) << pad("accepted", 10) << pad("null mean", 12)
      << pad("null sd", 12) << pad("causal mean", 13) << pad("causal sd", 12)
      << '\n';
  for (const auto& r : doc.body.at("candidates")) {
    out << pad(format_number(r.at("lambda").get<double>(), 6), 12)
        << pad(r.at("accepted").get<bool>() ? "yes" : "no", 10)
        << pad(format_number(r.at("mean_null").get<double>(), 4), 12)
        << pad(format_number(r.at("sd_null").get<double>(), 4), 12)
        << pad(format_number(r.at("mean_causal").get<double>(), 4), 13)
        << pad(format_number(r.at("sd_causal").get<double>(), 4), 12) << '\n';
  }
  out << '\n' << doc.body.at("message").get<std::string>() << '\n';
  return out.str();
}

std::string render_score_table(const ResultsDocument& doc) {
  const std::size_t n = doc.body.at("n").get<std::size_t>();
  const auto values =
      doc.body.at("scores").at("values").get<std::vector<double>>();
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("s" + std::to_string(i + 1));
  std::ostringstream out;
  out << "method: " << doc.body.at("method").get<std::string>()
      << ", source rows -> target columns\n\n";
  out << render_matrix_table(values, n, n, names, names);
  for (const auto& note : doc.body.at("notes")) {
    out << "note: " << note.get<std::string>() << '\n';
  }
  return out.str();
}

// Blue-to-red diverging color for t in [0, 1].
std::string heat_color(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const int r = static_cast<int>(255.0 * t);
  const int g = static_cast<int>(64.0 + 96.0 * (1.0 - std::fabs(2.0 * t - 1.0)));
  const int b = static_cast<int>(255.0 * (1.0 - t));
  char buffer[16];
  std::snprintf(buffer, sizeof(buffer), "#%02x%02x%02x", r, g, b);
  return buffer;
}

}  // namespace

std::string render_table(const ResultsDocument& doc) {
  const std::string type = doc.body.value("type", "");
  std::ostringstream out;
  out << "kind: " << doc.kind << "\n"
      << "tool: minpred " << doc.manifest.tool_version
      << "  seed: " << doc.manifest.master_seed
      << "  data: " << doc.manifest.data_fingerprint << "\n\n";
  if (type == "strength_matrix") {
    out << render_strength_table(doc);
  } else if (type == "benchmark") {
    out << render_benchmark_table(doc);
  } else if (type == "lambda_selection") {
    out << render_lambda_table(doc);
  } else if (type == "score_matrix") {
    out << render_score_table(doc);
  } else {
    throw DataError("report: unsupported body type '" + type + "'");
  }
  return out.str();
}

std::string render_heatmap_svg(const std::vector<double>& values,
                               std::size_t rows, std::size_t cols,
                               const std::vector<std::string>& row_names,
                               const std::vector<std::string>& col_names,
                               const std::string& title) {
  if (values.size() != rows * cols) {
    throw ShapeError("render_heatmap_svg: value count mismatch");
  }
  double lo = values.empty() ? 0.0 : values.front();
  double hi = lo;
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!(hi > lo)) hi = lo + 1.0;

  const int cell = 42;
  const int left = 110, top = 56;
  const int width = left + static_cast<int>(cols) * cell + 20;
  const int height = top + static_cast<int>(rows) * cell + 30;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << left << "\" y=\"22\" font-family=\"monospace\" "
      << "font-size=\"15\">" << title << "</text>\n";
  for (std::size_t c = 0; c < cols; ++c) {
    svg << "<text x=\"" << left + static_cast<int>(c) * cell + cell / 2
        << "\" y=\"" << top - 8
        << "\" font-family=\"monospace\" font-size=\"11\" "
        << "text-anchor=\"middle\">" << col_names[c] << "</text>\n";
  }
  for (std::size_t r = 0; r < rows; ++r) {
    svg << "<text x=\"" << left - 8 << "\" y=\""
        << top + static_cast<int>(r) * cell + cell / 2 + 4
        << "\" font-family=\"monospace\" font-size=\"11\" "
        << "text-anchor=\"end\">" << row_names[r] << "</text>\n";
    for (std::size_t c = 0; c < cols; ++c) {
      const double v = values[r * cols + c];
      const double t = (v - lo) / (hi - lo);
      svg << "<rect x=\"" << left + static_cast<int>(c) * cell << "\" y=\""
          << top + static_cast<int>(r) * cell << "\" width=\"" << cell
          << "\" height=\"" << cell << "\" fill=\"" << heat_color(t)
          << "\" stroke=\"#ffffff\"/>\n";
      svg << "<text x=\"" << left + static_cast<int>(c) * cell + cell / 2
          << "\" y=\"" << top + static_cast<int>(r) * cell + cell / 2 + 4
          << "\" font-family=\"monospace\" font-size=\"9\" "
          << "text-anchor=\"middle\">" << format_number(v, 2) << "</text>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string render_strength_vs_k_svg(
    const std::vector<ResultsDocument>& strength_docs) {
  if (strength_docs.empty()) {
    throw DataError("render_strength_vs_k_svg: no documents");
  }
  struct Point {
    double k;
    double value;
  };
  std::map<std::string, std::vector<Point>> curves;
  double max_value = 0.0, max_k = 1.0;
  for (const auto& doc : strength_docs) {
    if (doc.body.value("type", "") != "strength_matrix") {
      throw DataError("render_strength_vs_k_svg: document is not a strength "
                      "matrix");
    }
    const StrengthMatrix m = strength_matrix_from_body(doc.body);
    const double k =
        doc.manifest.config.value("k", static_cast<std::size_t>(0));
    max_k = std::max(max_k, k);
    for (std::size_t j = 0; j < m.n_real; ++j) {
      for (std::size_t i = 0; i < m.n_real; ++i) {
        if (i == j) continue;
        const std::string label = m.names[j] + "->" + m.names[i];
        const double v = m.raw_at(j, i);
        curves[label].push_back({k, v});
        max_value = std::max(max_value, v);
      }
    }
  }
  if (!(max_value > 0.0)) max_value = 1.0;

  const int width = 560, height = 360;
  const int left = 60, bottom = height - 44, top = 40, right = width - 150;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << left << "\" y=\"22\" font-family=\"monospace\" "
      << "font-size=\"14\">predictive strength vs window horizon K"
      << "</text>\n";
  svg << "<line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << right
      << "\" y2=\"" << bottom << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << left
      << "\" y2=\"" << top << "\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << (left + right) / 2 << "\" y=\"" << height - 12
      << "\" font-family=\"monospace\" font-size=\"12\" "
      << "text-anchor=\"middle\">K</text>\n";
  svg << "<text x=\"16\" y=\"" << (top + bottom) / 2
      << "\" font-family=\"monospace\" font-size=\"12\">nats</text>\n";

  const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                           "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};
  std::size_t color = 0;
  for (auto& [label, points] : curves) {
    std::sort(points.begin(), points.end(),
              [](const Point& a, const Point& b) { return a.k < b.k; });
    std::ostringstream path;
    for (const auto& p : points) {
      const double x = left + (p.k / max_k) * (right - left);
      const double y = bottom - (p.value / max_value) * (bottom - top);
      path << x << ',' << y << ' ';
    }
    const std::string stroke = palette[color % 8];
    svg << "<polyline fill=\"none\" stroke=\"" << stroke
        << "\" stroke-width=\"1.5\" points=\"" << path.str() << "\"/>\n";
    svg << "<text x=\"" << right + 8 << "\" y=\""
        << top + 14 * static_cast<int>(color)
        << "\" font-family=\"monospace\" font-size=\"11\" fill=\"" << stroke
        << "\">" << label << "</text>\n";
    ++color;
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace minpred

#include "seedo/report_io.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "seedo/error.hpp"

namespace seedo {
namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name) {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw Error(ErrorKind::SchemaError, "CSV header lacks column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

long long to_integer(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw PositionedError(ErrorKind::SchemaError, line, "line " + std::to_string(line) + ": '" + s + "' is not an integer");
}

double to_real(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw PositionedError(ErrorKind::SchemaError, line, "line " + std::to_string(line) + ": '" + s + "' is not a number");
}

struct Summary {
  std::vector<double> automated, manual;
};

}  // namespace

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) throw Error(ErrorKind::SchemaError, "unterminated quoted CSV field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\n\r") == std::string::npos) return value;
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string records_csv(const std::vector<EvalRecord>& records) {
  std::ostringstream os;
  os << "video_id,task_category,tsr,fsr,ssr,matched_steps,gt_steps,vision,spatial,temporal\n";
  for (const auto& r : records) {
    os << csv_field(r.video_id) << ',' << category_name(r.category) << ',' << r.tsr << ',' << r.fsr << ','
       << fixed6(r.ssr.value()) << ',' << r.ssr.matched << ',' << r.ssr.total << ',' << r.errors.vision << ','
       << r.errors.spatial << ',' << r.errors.temporal << '\n';
  }
  return os.str();
}

std::vector<EvalRecord> parse_records_csv(const std::string& text) {
  const auto rows = parse_csv(text);
  if (rows.empty()) throw Error(ErrorKind::SchemaError, "records CSV is empty");
  const auto& h = rows.front();
  const std::size_t c_id = column_index(h, "video_id"), c_cat = column_index(h, "task_category"),
                    c_tsr = column_index(h, "tsr"), c_fsr = column_index(h, "fsr"),
                    c_matched = column_index(h, "matched_steps"), c_total = column_index(h, "gt_steps"),
                    c_v = column_index(h, "vision"), c_s = column_index(h, "spatial"), c_t = column_index(h, "temporal");
  std::vector<EvalRecord> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const std::size_t line = i + 1;
    if (row.size() != h.size()) {
      throw PositionedError(ErrorKind::SchemaError, line, "line " + std::to_string(line) + ": wrong number of fields");
    }
    EvalRecord r;
    r.video_id = row[c_id];
    auto cat = category_from_name(row[c_cat]);
    if (!cat) throw PositionedError(ErrorKind::SchemaError, line, "line " + std::to_string(line) + ": unknown category");
    r.category = *cat;
    r.tsr = static_cast<int>(to_integer(row[c_tsr], line));
    r.fsr = static_cast<int>(to_integer(row[c_fsr], line));
    r.ssr.matched = static_cast<std::size_t>(to_integer(row[c_matched], line));
    r.ssr.total = static_cast<std::size_t>(to_integer(row[c_total], line));
    if (r.ssr.total == 0 || r.ssr.matched > r.ssr.total) {
      throw PositionedError(ErrorKind::SchemaError, line, "line " + std::to_string(line) + ": bad step counts");
    }
    r.errors = {to_integer(row[c_v], line) != 0, to_integer(row[c_s], line) != 0, to_integer(row[c_t], line) != 0};
    out.push_back(std::move(r));
  }
  return out;
}

std::string report_csv(const std::vector<ModelReport>& reports) {
  std::ostringstream os;
  os << "model";
  for (auto c : kAllCategories) {
    for (const char* m : {"tsr", "fsr", "ssr"}) os << ',' << category_name(c) << '_' << m;
  }
  os << '\n';
  for (const auto& mr : reports) {
    os << csv_field(mr.model);
    for (auto c : kAllCategories) {
      auto it = mr.report.scores.find(c);
      if (it == mr.report.scores.end()) {
        os << ",,,";
        continue;
      }
      os << ',' << format_hundredths(it->second.tsr) << ',' << format_hundredths(it->second.fsr) << ','
         << format_hundredths(it->second.ssr);
    }
    os << '\n';
  }
  return os.str();
}

std::string errors_csv(const std::vector<ModelReport>& reports) {
  std::ostringstream os;
  os << "model,category,failures,vision,spatial,temporal\n";
  const auto row = [&](const std::string& model, std::string_view category, const ErrorScores& e) {
    os << csv_field(model) << ',' << category << ',' << e.failures << ',' << format_hundredths(e.vision) << ','
       << format_hundredths(e.spatial) << ',' << format_hundredths(e.temporal) << '\n';
  };
  for (const auto& mr : reports) {
    for (const auto& [category, e] : mr.report.errors) row(mr.model, category_name(category), e);
    row(mr.model, "all", mr.report.overall_errors);
  }
  return os.str();
}

std::string report_svg(const std::vector<ModelReport>& reports) {
  static const char* colors[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1"};
  const int bar = 14, gap = 18, plot_h = 200, top = 30, left = 50;
  const int models = static_cast<int>(std::max<std::size_t>(1, reports.size()));
  const int group_w = models * bar + gap;
  const int groups = 9;
  const int width = left + groups * group_w + 20;
  const int height = top + plot_h + 70 + 16 * models;

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (int pct = 0; pct <= 100; pct += 25) {
    const int y = top + plot_h - pct * plot_h / 100;
    os << "<line x1=\"" << left << "\" y1=\"" << y << "\" x2=\"" << width - 20 << "\" y2=\"" << y
       << "\" stroke=\"#ddd\"/>\n";
    os << "<text x=\"" << left - 6 << "\" y=\"" << y + 3 << "\" text-anchor=\"end\">" << pct << "</text>\n";
  }
  int g = 0;
  for (auto c : kAllCategories) {
    for (const char* metric : {"TSR", "FSR", "SSR"}) {
      const int gx = left + g * group_w + gap / 2;
      for (std::size_t m = 0; m < reports.size(); ++m) {
        auto it = reports[m].report.scores.find(c);
        if (it == reports[m].report.scores.end()) continue;
        const std::int64_t v = metric[0] == 'T' ? it->second.tsr : metric[0] == 'F' ? it->second.fsr : it->second.ssr;
        const int h = static_cast<int>(v * plot_h / 10000);
        os << "<rect x=\"" << gx + static_cast<int>(m) * bar << "\" y=\"" << top + plot_h - h << "\" width=\""
           << bar - 2 << "\" height=\"" << h << "\" fill=\"" << colors[m % 7] << "\"><title>" << reports[m].model
           << ' ' << category_name(c) << ' ' << metric << ' ' << format_hundredths(v) << "</title></rect>\n";
      }
      os << "<text x=\"" << gx + models * bar / 2 << "\" y=\"" << top + plot_h + 14 << "\" text-anchor=\"middle\">"
         << metric << "</text>\n";
      if (metric[0] == 'F') {
        os << "<text x=\"" << gx + models * bar / 2 << "\" y=\"" << top + plot_h + 28 << "\" text-anchor=\"middle\">"
           << category_name(c) << "</text>\n";
      }
      ++g;
    }
  }
  for (std::size_t m = 0; m < reports.size(); ++m) {
    const int y = top + plot_h + 44 + static_cast<int>(m) * 16;
    os << "<rect x=\"" << left << "\" y=\"" << y - 9 << "\" width=\"10\" height=\"10\" fill=\"" << colors[m % 7]
       << "\"/>\n<text x=\"" << left + 14 << "\" y=\"" << y << "\">" << reports[m].model << "</text>\n";
  }
  os << "<text x=\"" << left << "\" y=\"16\" font-size=\"12\">Success rate (%)</text>\n</svg>\n";
  return os.str();
}

std::vector<ScoreRow> parse_score_csv(const std::string& text, const std::string& column) {
  const auto rows = parse_csv(text);
  if (rows.empty()) throw Error(ErrorKind::SchemaError, "score CSV is empty");
  const auto& h = rows.front();
  const std::size_t c_id = column_index(h, "video_id"), c_score = column_index(h, column);
  const auto cat_it = std::find(h.begin(), h.end(), "task_category");
  std::vector<ScoreRow> out;
  std::set<std::string> seen;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const std::size_t line = i + 1;
    if (rows[i].size() != h.size()) {
      throw PositionedError(ErrorKind::SchemaError, line, "line " + std::to_string(line) + ": wrong number of fields");
    }
    ScoreRow r{rows[i][c_id], {}, to_real(rows[i][c_score], line)};
    if (cat_it != h.end()) r.category = rows[i][static_cast<std::size_t>(cat_it - h.begin())];
    if (!seen.insert(r.video_id).second) {
      throw PositionedError(ErrorKind::SchemaError, line, "line " + std::to_string(line) + ": duplicate video_id");
    }
    out.push_back(std::move(r));
  }
  return out;
}

ComparisonOutput compare_score_tables(const std::vector<ScoreRow>& automated, const std::vector<ScoreRow>& manual) {
  std::map<std::string, const ScoreRow*> by_id;
  for (const auto& r : manual) by_id[r.video_id] = &r;
  if (automated.size() != manual.size()) {
    throw Error(ErrorKind::LengthMismatch, std::to_string(automated.size()) + " automated rows vs " +
                                               std::to_string(manual.size()) + " manual rows");
  }

  std::ostringstream diffs;
  diffs << "video_id,task_category,automated,manual,abs_diff\n";
  std::map<std::string, Summary> per_category;
  Summary all;
  for (const auto& a : automated) {
    auto it = by_id.find(a.video_id);
    if (it == by_id.end()) throw Error(ErrorKind::LengthMismatch, "video '" + a.video_id + "' has no manual score");
    const ScoreRow& m = *it->second;
    const std::string category = a.category.empty() ? m.category : a.category;
    diffs << csv_field(a.video_id) << ',' << csv_field(category) << ',' << fixed6(a.score) << ',' << fixed6(m.score)
          << ',' << fixed6(std::abs(a.score - m.score)) << '\n';
    all.automated.push_back(a.score);
    all.manual.push_back(m.score);
    if (!category.empty()) {
      per_category[category].automated.push_back(a.score);
      per_category[category].manual.push_back(m.score);
    }
  }

  ComparisonOutput out;
  out.diffs_csv = diffs.str();
  out.overall = compare_scores(all.automated, all.manual);
  std::ostringstream summary;
  summary << "scope,n,mean_abs_diff,identical_count\n";
  for (const auto& [category, s] : per_category) {
    const auto c = compare_scores(s.automated, s.manual);
    summary << csv_field(category) << ',' << s.automated.size() << ',' << fixed6(c.mean_abs_diff) << ','
            << c.identical_count << '\n';
  }
  summary << "all," << all.automated.size() << ',' << fixed6(out.overall.mean_abs_diff) << ','
          << out.overall.identical_count << '\n';
  out.summary_csv = summary.str();
  return out;
}

}  // namespace seedo

#include "chainforge/report.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <limits>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "chainforge/error.hpp"

namespace chainforge::report {

using nlohmann::json;

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

json design_to_json(const NetworkInstance& instance, const gfa::GfaResult& result) {
  const auto& d = result.design;
  json dcs = json::array();
  for (std::size_t h = 0; h < instance.dcs.size(); ++h) {
    dcs.push_back({{"id", instance.dcs[h].id},
                   {"region", instance.regions[instance.dcs[h].region].id},
                   {"x", d.dc_locations[h].x},
                   {"y", d.dc_locations[h].y},
                   {"warehouse", instance.warehouses[d.dc_supplier[h]].id}});
  }
  json customers = json::array();
  for (std::size_t l = 0; l < instance.customers.size(); ++l) {
    customers.push_back(
        {{"id", instance.customers[l].id}, {"dc", instance.dcs[d.customer_dc[l]].id}});
  }
  std::vector<std::vector<int>> z(instance.warehouses.size(),
                                  std::vector<int>(instance.dcs.size(), 0));
  std::vector<std::vector<int>> y(instance.dcs.size(),
                                  std::vector<int>(instance.customers.size(), 0));
  for (std::size_t h = 0; h < instance.dcs.size(); ++h) z[d.dc_supplier[h]][h] = 1;
  for (std::size_t l = 0; l < instance.customers.size(); ++l) y[d.customer_dc[l]][l] = 1;
  json regions = json::array();
  for (const auto& r : result.regions) {
    regions.push_back({{"id", r.region_id},
                       {"W", r.objective},
                       {"iterations", r.iterations},
                       {"converged", r.converged}});
  }
  return {{"dcs", dcs},         {"customers", customers}, {"z", z},
          {"y", y},             {"distances", d.distances}, {"regions", regions}};
}

NetworkDesign design_from_json(const NetworkInstance& instance, const json& doc) {
  const auto H = instance.dcs.size();
  const auto L = instance.customers.size();
  NetworkDesign d;
  d.dc_locations.resize(H);
  d.dc_supplier.assign(H, instance.warehouses.size());
  d.customer_dc.assign(L, H);
  try {
    std::vector<bool> seen(H, false);
    for (const auto& e : doc.at("dcs")) {
      const auto id = e.at("id").get<std::string>();
      const auto h = instance.find_dc(id);
      if (!h) throw ParseError("design: unknown DC '" + id + "'");
      if (seen[*h]) throw ParseError("design: DC '" + id + "' listed twice");
      seen[*h] = true;
      d.dc_locations[*h] = {e.at("x").get<double>(), e.at("y").get<double>()};
      const auto wid = e.at("warehouse").get<std::string>();
      const auto w = instance.find_warehouse(wid);
      if (!w) throw ParseError("design: unknown warehouse '" + wid + "'");
      d.dc_supplier[*h] = *w;
    }
    if (std::count(seen.begin(), seen.end(), true) != static_cast<long>(H)) {
      throw ParseError("design: DC list does not match the instance");
    }
    std::vector<bool> linked(L, false);
    for (const auto& e : doc.at("customers")) {
      const auto id = e.at("id").get<std::string>();
      const auto l = instance.find_customer(id);
      if (!l) throw ParseError("design: unknown customer '" + id + "'");
      if (linked[*l]) throw ParseError("design: customer '" + id + "' listed twice");
      linked[*l] = true;
      const auto did = e.at("dc").get<std::string>();
      const auto h = instance.find_dc(did);
      if (!h) throw ParseError("design: unknown DC '" + did + "'");
      d.customer_dc[*l] = *h;
    }
    if (std::count(linked.begin(), linked.end(), true) != static_cast<long>(L)) {
      throw ParseError("design: customer list does not match the instance");
    }
    d.distances = doc.at("distances").get<std::vector<std::vector<double>>>();
    const auto z = doc.at("z").get<std::vector<std::vector<int>>>();
    const auto y = doc.at("y").get<std::vector<std::vector<int>>>();
    bool consistent = z.size() == instance.warehouses.size() && y.size() == H;
    for (std::size_t w = 0; consistent && w < z.size(); ++w) {
      consistent = z[w].size() == H;
      for (std::size_t h = 0; consistent && h < H; ++h) {
        consistent = (z[w][h] == 1) == (d.dc_supplier[h] == w) && (z[w][h] == 0 || z[w][h] == 1);
      }
    }
    for (std::size_t h = 0; consistent && h < H; ++h) {
      consistent = y[h].size() == L;
      for (std::size_t l = 0; consistent && l < L; ++l) {
        consistent = (y[h][l] == 1) == (d.customer_dc[l] == h) && (y[h][l] == 0 || y[h][l] == 1);
      }
    }
    if (!consistent) throw ParseError("design: z/y matrices disagree with the linkages");
  } catch (const json::exception& e) {
    throw ParseError(std::string("design: ") + e.what());
  }
  validate_design(instance, d);
  return d;
}

NetworkDesign load_design(const NetworkInstance& instance, const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return design_from_json(instance, doc);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw ParseError("cannot write '" + path.string() + "'");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

namespace {

constexpr const char* kSolutionColumns[] = {"epsilon",          "Z1",         "Z1_se",
                                            "Z2",               "Z2_se",      "inventory_cost",
                                            "unfulfilled_cost", "order_cost"};

std::string table(const pareto::SolutionPool& pool, bool with_front) {
  std::string out;
  for (const auto* c : kSolutionColumns) {
    if (c != kSolutionColumns[0]) out += ',';
    out += c;
  }
  if (with_front) out += ",on_front";
  out += '\n';
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& s : pool.solutions) {
    const bool ok = s.ok();
    const double values[] = {s.epsilon,
                             ok ? s.z1 : nan,
                             ok ? s.z1_se : nan,
                             ok ? s.z2 : nan,
                             ok ? s.z2_se : nan,
                             ok ? s.inventory_cost : nan,
                             ok ? s.unfulfilled_cost : nan,
                             ok ? s.order_cost : nan};
    for (std::size_t k = 0; k < std::size(values); ++k) {
      if (k) out += ',';
      out += format_number(values[k]);
    }
    if (with_front) out += s.on_front ? ",1" : ",0";
    out += '\n';
  }
  return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(line);
  for (std::string p; std::getline(ss, p, sep);) parts.push_back(p);
  if (!line.empty() && line.back() == sep) parts.emplace_back();
  return parts;
}

double parse_number(const std::string& text, std::size_t row) {
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw ParseError("solutions table row " + std::to_string(row) + ": bad number '" + text + "'");
}

}  // namespace

std::string solutions_csv(const pareto::SolutionPool& pool) { return table(pool, false); }

std::string front_csv(const pareto::SolutionPool& pool) { return table(pool, true); }

pareto::SolutionPool parse_solutions_csv(const std::string& text) {
  std::stringstream ss(text);
  std::string line;
  if (!std::getline(ss, line)) throw ParseError("solutions table is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line, ',');
  constexpr std::size_t n = std::size(kSolutionColumns);
  if (header.size() < n || !std::equal(kSolutionColumns, kSolutionColumns + n, header.begin())) {
    throw ParseError("solutions table: unexpected header '" + line + "'");
  }
  pareto::SolutionPool pool;
  for (std::size_t row = 1; std::getline(ss, line); ++row) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != header.size()) {
      throw ParseError("solutions table row " + std::to_string(row) + ": expected " +
                       std::to_string(header.size()) + " fields");
    }
    double v[n];
    for (std::size_t k = 0; k < n; ++k) v[k] = parse_number(cells[k], row);
    pareto::ParetoSolution s;
    s.epsilon = v[0];
    s.z1 = v[1];
    s.z1_se = v[2];
    s.z2 = v[3];
    s.z2_se = v[4];
    s.inventory_cost = v[5];
    s.unfulfilled_cost = v[6];
    s.order_cost = v[7];
    if (!std::isfinite(s.z1) || !std::isfinite(s.z2)) s.error = "estimate failed";
    pool.solutions.push_back(std::move(s));
  }
  pareto::mark_front(pool);
  return pool;
}

namespace {

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string front_svg(const pareto::SolutionPool& pool) {
  constexpr double width = 640, height = 480, left = 80, right = 20, top = 30, bottom = 60;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : pool.solutions) {
    if (!s.ok()) continue;
    x0 = std::min(x0, s.z2);
    x1 = std::max(x1, s.z2);
    y0 = std::min(y0, s.z1);
    y1 = std::max(y1, s.z1);
  }
  if (!(x0 <= x1)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  auto pad = [](double& lo, double& hi) {
    const double span = hi - lo;
    const double margin = span > 0 ? 0.05 * span : std::max(1e-9, 0.05 * std::abs(lo) + 1e-9);
    lo -= margin;
    hi += margin;
  };
  pad(x0, x1);
  pad(y0, y1);
  auto px = [&](double v) { return left + (v - x0) / (x1 - x0) * (width - left - right); };
  auto py = [&](double v) { return height - bottom - (v - y0) / (y1 - y0) * (height - top - bottom); };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
         "viewBox=\"0 0 640 480\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
  svg += "<rect x=\"" + fixed(left) + "\" y=\"" + fixed(top) + "\" width=\"" +
         fixed(width - left - right) + "\" height=\"" + fixed(height - top - bottom) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0;
    const double yv = y0 + (y1 - y0) * k / 4.0;
    svg += "<text x=\"" + fixed(px(xv)) + "\" y=\"" + fixed(height - bottom + 18) +
           "\" text-anchor=\"middle\">" + format_number(xv) + "</text>\n";
    svg += "<text x=\"" + fixed(left - 6) + "\" y=\"" + fixed(py(yv) + 4) +
           "\" text-anchor=\"end\">" + format_number(yv) + "</text>\n";
  }
  svg += "<text x=\"" + fixed(left + (width - left - right) / 2) + "\" y=\"" +
         fixed(height - 15) + "\" text-anchor=\"middle\">Z2 (total cost)</text>\n";
  svg += "<text x=\"15\" y=\"" + fixed(top + (height - top - bottom) / 2) +
         "\" text-anchor=\"middle\" transform=\"rotate(-90 15 " +
         fixed(top + (height - top - bottom) / 2) + ")\">Z1 (accessibility)</text>\n";

  auto front = pool.front();
  std::stable_sort(front.begin(), front.end(), [&](std::size_t a, std::size_t b) {
    return pool.solutions[a].z2 < pool.solutions[b].z2;
  });
  if (!front.empty()) {
    svg += "<polyline fill=\"none\" stroke=\"#c0392b\" stroke-dasharray=\"6 4\" points=\"";
    for (std::size_t k = 0; k < front.size(); ++k) {
      const auto& s = pool.solutions[front[k]];
      if (k) svg += ' ';
      svg += fixed(px(s.z2)) + "," + fixed(py(s.z1));
    }
    svg += "\"/>\n";
  }
  for (const auto& s : pool.solutions) {
    if (!s.ok()) continue;
    svg += "<circle cx=\"" + fixed(px(s.z2)) + "\" cy=\"" + fixed(py(s.z1)) + "\" r=\"" +
           (s.on_front ? "5\" fill=\"#c0392b\"" : "4\" fill=\"#7f8c8d\"") + "><title>epsilon " +
           format_number(s.epsilon) + "</title></circle>\n";
  }
  svg += "</svg>\n";
  return svg;
}

std::string validation_csv(const NetworkInstance& instance,
                           const std::vector<ValidationRow>& rows) {
  std::string out = "solution,epsilon,runs";
  for (const char* c : {"inventory_cost", "unfulfilled_cost", "order_cost", "total_cost"}) {
    out += std::string(",") + c + "," + c + "_se";
  }
  out += ",opt_inventory_cost,opt_unfulfilled_cost,opt_order_cost,opt_total_cost";
  for (const auto& r : instance.regions) {
    out += ",service_" + r.id + ",service_" + r.id + "_se";
  }
  out += ",service_total,service_total_se\n";
  for (const auto& row : rows) {
    const auto& s = row.summary;
    out += std::to_string(row.solution) + "," + format_number(row.plan->epsilon) + "," +
           std::to_string(s.runs);
    for (const auto* st : {&s.inventory_cost, &s.unfulfilled_cost, &s.order_cost, &s.total_cost}) {
      out += "," + format_number(st->mean) + "," + format_number(st->se);
    }
    const auto& c = row.plan->costs;
    for (double v : {c.inventory, c.unfulfilled, c.order, c.total()}) out += "," + format_number(v);
    for (const auto& st : s.region_service) {
      out += "," + format_number(st.mean) + "," + format_number(st.se);
    }
    out += "," + format_number(s.service.mean) + "," + format_number(s.service.se) + "\n";
  }
  return out;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int k = 0; k < len; ++k) {
    out += hex[digest[k] >> 4];
    out += hex[digest[k] & 15];
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_text(path)); }

}  // namespace chainforge::report

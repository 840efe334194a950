#include "dspdhg/problem_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace dspdhg {

namespace {

std::string fmt(double v) {
  if (v == std::numeric_limits<double>::infinity()) return "inf";
  if (v == -std::numeric_limits<double>::infinity()) return "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& tok) {
  if (tok == "inf") return std::numeric_limits<double>::infinity();
  if (tok == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  const double v = std::stod(tok, &used);
  if (used != tok.size()) throw std::runtime_error("bad number '" + tok + "'");
  return v;
}

void write_vec(std::ostream& out, const Vec& v) {
  for (double x : v) out << " " << fmt(x);
}

void write_atom(std::ostream& out, const ProxAtom& a) {
  out << a.kind_name() << " " << a.dim();
  switch (a.kind()) {
    case ProxAtom::Kind::zero:
    case ProxAtom::Kind::half_square:
      break;
    case ProxAtom::Kind::diag_quadratic:
      out << " w";
      write_vec(out, a.w());
      break;
    case ProxAtom::Kind::linear_over_box:
      out << " c";
      write_vec(out, a.c());
      out << " lo";
      write_vec(out, a.lo());
      out << " hi";
      write_vec(out, a.hi());
      break;
    case ProxAtom::Kind::diag_quad_over_box:
      out << " w";
      write_vec(out, a.w());
      out << " lo";
      write_vec(out, a.lo());
      out << " hi";
      write_vec(out, a.hi());
      break;
    case ProxAtom::Kind::hinge:
      out << " scale " << fmt(a.scale());
      break;
  }
  out << "\n";
}

Vec read_vec(std::istringstream& ls, int dim, const char* tag) {
  std::string head;
  if (!(ls >> head) || head != tag)
    throw std::runtime_error(std::string("atom line: expected '") + tag + "' parameter");
  Vec v(static_cast<std::size_t>(dim));
  std::string tok;
  for (double& x : v) {
    if (!(ls >> tok)) throw std::runtime_error("atom line: truncated parameter vector");
    x = parse_double(tok);
  }
  return v;
}

ProxAtom read_atom(const std::string& line) {
  std::istringstream ls(line);
  std::string kind;
  int dim = 0;
  if (!(ls >> kind >> dim) || dim < 1) throw std::runtime_error("bad atom line: " + line);
  if (kind == "zero") return ProxAtom::zero(dim);
  if (kind == "half_square") return ProxAtom::half_square(dim);
  if (kind == "diag_quadratic") return ProxAtom::diag_quadratic(read_vec(ls, dim, "w"));
  if (kind == "linear_over_box") {
    Vec c = read_vec(ls, dim, "c");
    Vec lo = read_vec(ls, dim, "lo");
    Vec hi = read_vec(ls, dim, "hi");
    return ProxAtom::linear_over_box(std::move(c), std::move(lo), std::move(hi));
  }
  if (kind == "diag_quad_over_box") {
    Vec w = read_vec(ls, dim, "w");
    Vec lo = read_vec(ls, dim, "lo");
    Vec hi = read_vec(ls, dim, "hi");
    return ProxAtom::diag_quad_over_box(std::move(w), std::move(lo), std::move(hi));
  }
  if (kind == "hinge") {
    std::string head, tok;
    if (!(ls >> head >> tok) || head != "scale") throw std::runtime_error("bad hinge line: " + line);
    return ProxAtom::hinge(dim, parse_double(tok));
  }
  throw std::runtime_error("unknown atom kind '" + kind + "'");
}

void write_partition(std::ostream& out, const char* key, const BlockPartition& p) {
  out << key << " =";
  for (int b : p.boundaries()) out << " " << b;
  out << "\n";
}

}  // namespace

void write_problem(std::ostream& out, const SaddleProblem& problem) {
  out << "# saddle problem, format v1\n";
  out << "[meta]\n";
  out << "name = " << problem.name << "\n";
  out << "[partitions]\n";
  write_partition(out, "rows", problem.A.row_partition());
  write_partition(out, "cols", problem.A.col_partition());
  out << "[g]\n";
  for (const ProxAtom& a : problem.g) write_atom(out, a);
  out << "[fstar]\n";
  for (const ProxAtom& a : problem.fstar) write_atom(out, a);
  if (!problem.f.empty()) {
    out << "[f]\n";
    for (const ProxAtom& a : problem.f) write_atom(out, a);
  }
  out << "[A]\n";
  write_matrix_market(out, problem.A);
}

void write_problem_file(const std::string& path, const SaddleProblem& problem) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_problem(out, problem);
}

SaddleProblem read_problem(std::istream& in) {
  std::string name;
  std::optional<BlockPartition> rows, cols;
  std::vector<ProxAtom> g, fstar, f;
  std::string section;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      section = line;
      if (section == "[A]") break;
      continue;
    }
    if (section == "[meta]") {
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw std::runtime_error("bad meta line: " + line);
      const std::string key = line.substr(0, line.find(' '));
      if (key == "name") {
        const auto start = line.find_first_not_of(' ', eq + 1);
        name = start == std::string::npos ? "" : line.substr(start);
      }
    } else if (section == "[partitions]") {
      std::istringstream ls(line);
      std::string key, eq;
      if (!(ls >> key >> eq) || eq != "=") throw std::runtime_error("bad partition line: " + line);
      std::vector<int> bounds;
      int b;
      while (ls >> b) bounds.push_back(b);
      if (key == "rows")
        rows = BlockPartition(bounds);
      else if (key == "cols")
        cols = BlockPartition(bounds);
      else
        throw std::runtime_error("unknown partition '" + key + "'");
    } else if (section == "[g]") {
      g.push_back(read_atom(line));
    } else if (section == "[fstar]") {
      fstar.push_back(read_atom(line));
    } else if (section == "[f]") {
      f.push_back(read_atom(line));
    } else {
      throw std::runtime_error("content outside any known section: " + line);
    }
  }
  if (section != "[A]") throw std::runtime_error("problem file: missing [A] section");
  if (!rows || !cols) throw std::runtime_error("problem file: missing partitions");

  const MatrixMarketData mm = read_matrix_market(in);
  if (mm.rows != rows->dim() || mm.cols != cols->dim())
    throw std::runtime_error("problem file: matrix dimensions do not match the partitions");
  BlockMatrix A(*rows, *cols, mm.entries);
  return make_problem(std::move(A), std::move(g), std::move(fstar), std::move(f), name);
}

SaddleProblem read_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return read_problem(in);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void write_reference(std::ostream& out, const ReferencePoint& ref) {
  out << "# reference point, format v1\n";
  out << "objective = " << fmt(ref.objective) << "\n";
  out << "relkkt = " << fmt(ref.relkkt) << "\n";
  out << "certified = " << (ref.certified ? 1 : 0) << "\n";
  out << "[x]\n";
  for (double v : ref.z.x) out << fmt(v) << "\n";
  out << "[y]\n";
  for (double v : ref.z.y) out << fmt(v) << "\n";
}

void write_reference_file(const std::string& path, const ReferencePoint& ref) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_reference(out, ref);
}

ReferencePoint read_reference(std::istream& in) {
  ReferencePoint ref;
  std::string line;
  Vec* target = nullptr;
  bool seen_obj = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line == "[x]") {
      target = &ref.z.x;
      continue;
    }
    if (line == "[y]") {
      target = &ref.z.y;
      continue;
    }
    if (target != nullptr) {
      target->push_back(parse_double(line));
      continue;
    }
    std::istringstream ls(line);
    std::string key, eq, val;
    if (!(ls >> key >> eq >> val) || eq != "=")
      throw std::runtime_error("reference file: bad line: " + line);
    if (key == "objective") {
      ref.objective = parse_double(val);
      seen_obj = true;
    } else if (key == "relkkt") {
      ref.relkkt = parse_double(val);
    } else if (key == "certified") {
      ref.certified = val != "0";
    } else {
      throw std::runtime_error("reference file: unknown key '" + key + "'");
    }
  }
  if (!seen_obj || ref.z.x.empty() || ref.z.y.empty())
    throw std::runtime_error("reference file: missing objective or point");
  return ref;
}

ReferencePoint read_reference_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return read_reference(in);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

}  // namespace dspdhg

#include "iqcrate/sdpa.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace iqcrate {

Matrix SdpaProblem::matrix(int matrix_index, int block) const {
  if (block < 1 || block > static_cast<int>(blocks.size()))
    throw Error(ErrorCode::InvalidArgument, "SDPA block index out of range");
  const int size = std::abs(blocks[static_cast<std::size_t>(block - 1)]);
  Matrix out = Matrix::Zero(size, size);
  for (const auto& e : entries) {
    if (e.matrix != matrix_index || e.block != block) continue;
    out(e.row - 1, e.col - 1) = e.value;
    out(e.col - 1, e.row - 1) = e.value;
  }
  return out;
}

namespace {

void push_upper(SdpaProblem& prob, int matrix_index, const Matrix& F) {
  for (Eigen::Index i = 0; i < F.rows(); ++i)
    for (Eigen::Index j = i; j < F.cols(); ++j)
      if (F(i, j) != 0.0)
        prob.entries.push_back({matrix_index, 1, static_cast<int>(i + 1), static_cast<int>(j + 1), F(i, j)});
}

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Splits on whitespace and the separators SDPA tolerates: , { } ( ).
std::vector<std::string> tokens(const std::string& line) {
  std::string cleaned = line;
  for (char& ch : cleaned)
    if (ch == ',' || ch == '{' || ch == '}' || ch == '(' || ch == ')') ch = ' ';
  std::istringstream ss(cleaned);
  std::vector<std::string> out;
  std::string t;
  while (ss >> t) out.push_back(t);
  return out;
}

bool parse_int(const std::string& s, long& out) {
  errno = 0;
  char* end = nullptr;
  out = std::strtol(s.c_str(), &end, 10);
  return errno == 0 && end != s.c_str() && *end == '\0';
}

bool parse_double(const std::string& s, double& out) {
  errno = 0;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return errno == 0 && end != s.c_str() && *end == '\0';
}

struct Parsed {
  SdpaProblem problem;
  SdpaValidation status;
};

Parsed parse(std::istream& is) {
  Parsed out;
  auto fail = [&](int line, std::string msg) {
    out.status = {false, line, std::move(msg)};
    return out;
  };
  SdpaProblem& p = out.problem;
  std::string line;
  int lineno = 0;
  bool in_header = true;
  int stage = 0;  // 0 mDIM, 1 nBLOCK, 2 block struct, 3 cost, 4 entries
  std::vector<double> cost;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (in_header && !line.empty() && (line[0] == '"' || line[0] == '*')) {
      p.comments.push_back(line.substr(1));
      continue;
    }
    in_header = false;
    const auto tok = tokens(line);
    if (tok.empty()) continue;
    if (stage == 0 || stage == 1) {
      // Trailing annotations such as "= mDIM" are permitted after the number.
      long v = 0;
      if (!parse_int(tok[0], v) || v < (stage == 0 ? 0 : 1))
        return fail(lineno, stage == 0 ? "expected mDIM (nonnegative integer)" : "expected nBLOCK (positive integer)");
      if (stage == 0) p.variables = static_cast<int>(v);
      else p.blocks.assign(static_cast<std::size_t>(v), 0);
      ++stage;
      continue;
    }
    if (stage == 2) {
      if (tok.size() < p.blocks.size()) return fail(lineno, "bLOCKsTRUCT needs one size per block");
      for (std::size_t b = 0; b < p.blocks.size(); ++b) {
        long v = 0;
        if (!parse_int(tok[b], v) || v == 0) return fail(lineno, "block sizes must be nonzero integers");
        p.blocks[b] = static_cast<int>(v);
      }
      stage = p.variables == 0 ? 4 : 3;
      continue;
    }
    if (stage == 3) {
      for (const auto& t : tok) {
        double v = 0.0;
        if (!parse_double(t, v)) return fail(lineno, "cost vector entry '" + t + "' is not a number");
        cost.push_back(v);
        if (static_cast<int>(cost.size()) > p.variables) return fail(lineno, "cost vector longer than mDIM");
      }
      if (static_cast<int>(cost.size()) == p.variables) stage = 4;
      continue;
    }
    if (tok.size() != 5) return fail(lineno, "entry needs 5 fields: matno blkno i j value");
    long mat = 0, blk = 0, i = 0, j = 0;
    double val = 0.0;
    if (!parse_int(tok[0], mat) || !parse_int(tok[1], blk) || !parse_int(tok[2], i) || !parse_int(tok[3], j) ||
        !parse_double(tok[4], val))
      return fail(lineno, "malformed entry");
    if (mat < 0 || mat > p.variables) return fail(lineno, "matno out of range");
    if (blk < 1 || blk > static_cast<long>(p.blocks.size())) return fail(lineno, "blkno out of range");
    const int bs = p.blocks[static_cast<std::size_t>(blk - 1)];
    const long size = std::abs(bs);
    if (i < 1 || j < 1 || i > size || j > size) return fail(lineno, "entry index outside its block");
    if (i > j) return fail(lineno, "entries must lie in the upper triangle (i <= j)");
    if (bs < 0 && i != j) return fail(lineno, "off-diagonal entry in a diagonal block");
    p.entries.push_back({static_cast<int>(mat), static_cast<int>(blk), static_cast<int>(i), static_cast<int>(j), val});
  }
  if (stage < 3) return fail(lineno, "file ends before the block structure");
  if (stage == 3) return fail(lineno, "file ends inside the cost vector");
  p.c = Eigen::Map<const Vector>(cost.data(), static_cast<Eigen::Index>(cost.size()));
  return out;
}

}  // namespace

SdpaProblem kyp_to_sdpa(const KypLmi& lmi) {
  const Eigen::Index n = lmi.states();
  const Eigen::Index N = lmi.dim();
  const int nvar = static_cast<int>(n * (n + 1) / 2);
  SdpaProblem prob;
  prob.variables = nvar + 1;
  prob.blocks = {static_cast<int>(N)};
  prob.c = Vector::Zero(prob.variables);
  prob.c(nvar) = 1.0;
  prob.comments.push_back("iqcrate KYP LMI: minimize t subject to t I - LMI(P) >= 0");
  prob.comments.push_back(" LMI(P) = [C D]' M [C D] + [A B]' P [A B] - diag(P, 0), P symmetric " +
                          std::to_string(n) + " x " + std::to_string(n));
  prob.comments.push_back(" F0 = LMI(0); F_k = -(LMI(E_k) - LMI(0)); F_" + std::to_string(nvar + 1) + " = I");
  int k = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j)
      prob.comments.push_back(" x" + std::to_string(++k) + " = P(" + std::to_string(i + 1) + "," +
                              std::to_string(j + 1) + ")" + (i == j ? "" : " = P(" + std::to_string(j + 1) + "," +
                                                                            std::to_string(i + 1) + ")"));
  prob.comments.push_back(" x" + std::to_string(nvar + 1) + " = t; feasible iff optimal t < 0");

  push_upper(prob, 0, lmi.constant_term());
  k = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) {
      Matrix E = Matrix::Zero(n, n);
      E(i, j) = 1.0;
      E(j, i) = 1.0;
      push_upper(prob, ++k, -lmi.linear_term(E));
    }
  push_upper(prob, nvar + 1, Matrix::Identity(N, N));
  return prob;
}

void write_sdpa(const SdpaProblem& p, std::ostream& os) {
  for (const auto& c : p.comments) os << '*' << c << '\n';
  os << p.variables << " = mDIM\n";
  os << p.blocks.size() << " = nBLOCK\n";
  for (std::size_t b = 0; b < p.blocks.size(); ++b) os << (b ? " " : "") << p.blocks[b];
  os << " = bLOCKsTRUCT\n";
  for (Eigen::Index i = 0; i < p.c.size(); ++i) os << (i ? " " : "") << format_value(p.c(i));
  os << '\n';
  for (const auto& e : p.entries)
    os << e.matrix << ' ' << e.block << ' ' << e.row << ' ' << e.col << ' ' << format_value(e.value) << '\n';
}

void emit_sdpa(const KypLmi& lmi, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  write_sdpa(kyp_to_sdpa(lmi), os);
  if (!os) throw Error(ErrorCode::IoError, "write to " + path.string() + " failed");
}

SdpaProblem read_sdpa(std::istream& is) {
  Parsed p = parse(is);
  if (!p.status.ok)
    throw Error(ErrorCode::IoError, "SDPA line " + std::to_string(p.status.line) + ": " + p.status.message);
  return std::move(p.problem);
}

SdpaProblem read_sdpa(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return read_sdpa(is);
}

SdpaValidation validate_sdpa(std::istream& is) { return parse(is).status; }

}  // namespace iqcrate

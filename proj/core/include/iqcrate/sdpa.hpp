#pragma once

#include "iqcrate/lmi.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace iqcrate {

struct SdpaEntry {
  int matrix = 0;  // 0 is the constant F0
  int block = 1;
  int row = 1;     // 1-based, row <= col
  int col = 1;
  double value = 0.0;
};

/// SDPA sparse problem: min c'x s.t. sum_k x_k F_k - F_0 >= 0.
struct SdpaProblem {
  std::vector<std::string> comments;  // without the leading marker
  int variables = 0;
  std::vector<int> blocks;  // negative sizes are diagonal blocks
  Vector c;
  std::vector<SdpaEntry> entries;

  /// Dense symmetric F_matrix restricted to `block` (1-based).
  [[nodiscard]] Matrix matrix(int matrix_index, int block = 1) const;
};

/// min t s.t. t I - LMI(P) >= 0 with x = (upper triangle of P row by row, t).
/// F0 = LMI(0), F_k = -(linear part at the k-th basis matrix), F_t = I.
SdpaProblem kyp_to_sdpa(const KypLmi& lmi);

/// Values are written with 17 significant digits so reading them back is exact.
void write_sdpa(const SdpaProblem& problem, std::ostream& os);
void emit_sdpa(const KypLmi& lmi, const std::filesystem::path& path);

/// Throws IoError with the offending line on malformed input.
SdpaProblem read_sdpa(std::istream& is);
SdpaProblem read_sdpa(const std::filesystem::path& path);

struct SdpaValidation {
  bool ok = true;
  int line = 0;
  std::string message;
};

/// Syntax check against the sparse SDPA grammar: leading comment lines
/// (" or *), mDIM, nBLOCK, bLOCKsTRUCT, the cost vector, then
/// "matno blkno i j value" records with 0 <= matno <= mDIM,
/// 1 <= blkno <= nBLOCK, 1 <= i <= j <= block size (i = j on diagonal blocks).
SdpaValidation validate_sdpa(std::istream& is);

}  // namespace iqcrate

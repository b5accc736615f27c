#pragma once

// Brute-force reference implementations used to check the library. They
// share no code with src/ and favour the plainest formulation over speed.

#include <cstdint>
#include <vector>

namespace rovist::testing {

// --- non-redundancy over word ids ---------------------------------------

// A sentence as word ids in [0, 64); the words themselves are irrelevant.
using IdSentence = std::vector<int>;

struct NrOracleResult {
  double inter = 0.0;
  double intra = 0.0;
  double final_score = 1.0;
};

double OracleJaccard(std::uint64_t a, std::uint64_t b);
NrOracleResult OracleNr(const std::vector<IdSentence>& story, int n);

// --- contrastive loss -------------------------------------------------------

using Rows = std::vector<std::vector<double>>;

// Scalar loops over the batch: logits, similarity targets, row softmax,
// cross-entropy in both directions.
double OracleSymmetricLoss(const Rows& image, const Rows& text);

// --- correlation ------------------------------------------------------------

double OraclePearson(const std::vector<double>& x, const std::vector<double>& y);
// Mid-ranks by counting smaller and equal values.
std::vector<double> OracleRanks(const std::vector<double>& v);
double OracleSpearman(const std::vector<double>& x, const std::vector<double>& y);
// Tau-b from sign products and tie-group sizes.
double OracleKendall(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace rovist::testing

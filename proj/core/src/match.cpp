#include <noteval/align.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace noteval {
namespace {

double sq_l2(const std::vector<float>& a, const std::vector<float>& b) {
    double acc = 0.0;
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        const double d = static_cast<double>(a[i]) - b[i];
        acc += d * d;
    }
    return acc;
}

}  // namespace

std::vector<Match> match_descriptors(const std::vector<Keypoint>& a,
                                     const std::vector<Keypoint>& b, const AlignConfig& cfg) {
    cfg.validate();
    if (a.empty() || b.empty()) throw Error("match_descriptors: empty keypoint list");

    constexpr double kInf = std::numeric_limits<double>::infinity();
    const int na = static_cast<int>(a.size()), nb = static_cast<int>(b.size());

    // One pass over the full distance matrix feeds both directions: best and
    // runner-up per row (ratio test) and best per column (mutual check).
    std::vector<double> row_d1(na, kInf), row_d2(na, kInf), col_d(nb, kInf);
    std::vector<int> row_best(na, -1), col_best(nb, -1);

    for (int i = 0; i < na; ++i) {
        const std::vector<float>& da = a[i].descriptor;
        for (int j = 0; j < nb; ++j) {
            const double d = sq_l2(da, b[j].descriptor);
            if (d < row_d1[i]) {
                row_d2[i] = row_d1[i];
                row_d1[i] = d;
                row_best[i] = j;
            } else if (d < row_d2[i]) {
                row_d2[i] = d;
            }
            if (d < col_d[j]) {
                col_d[j] = d;
                col_best[j] = i;
            }
        }
    }

    std::vector<Match> out;
    const double ratio_sq = cfg.ratio_test * cfg.ratio_test;
    for (int i = 0; i < na; ++i) {
        if (row_best[i] < 0) continue;
        // Lowe ratio on squared distances; with a single candidate there is
        // no runner-up, so the test only passes in the degenerate |b| == 1
        // case.
        if (nb > 1 && row_d1[i] >= ratio_sq * row_d2[i]) continue;
        if (col_best[row_best[i]] != i) continue;  // not mutual
        out.push_back(Match{i, row_best[i], std::sqrt(row_d1[i])});
    }

    if (static_cast<int>(out.size()) < cfg.min_matches) throw Error("insufficient matches");
    return out;
}

}  // namespace noteval

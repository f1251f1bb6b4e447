#include "ctmark/dfb.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace ctmark {

namespace {

const double kSqrt2 = std::sqrt(2.0);

int wrap(int i, int n) {
    i %= n;
    return i < 0 ? i + n : i;
}

// --- Even-depth split: square sublattice (step s, offset ci,cj) into its
// two quincunx cosets. Sites are classified by the parity of
// p + q where (i,j) = (ci + p*s, cj + q*s); even parity is the "even"
// child, the odd child's representative offset is (ci+s, cj).
//
// Lifting with a separable product stencil along the diagonal directions
// (s,s) and (s,-s). Two passes per step (factored), periodic extension.
//
//   predict: odd  -= sum_{a,b} B[a] B[b] W[o + ((a+b-1)s, (a-b)s)]
//   update : even += 1/2 sum_{a,b} B[a] B[b] W[e - ((a+b-1)s, (a-b)s)]
//   scale  : even *= sqrt2, odd /= sqrt2
//
// where a,b index the ladder taps relative to their anchor.
struct Lattice {
    int ci, cj, s;
};

void split_square(Grid2D& W, Grid2D& scratch, const Lattice& L, const FilterTaps& B,
                  bool forward) {
    const int R = W.rows(), C = W.cols();
    const int s = L.s;
    const int P = R / s, Q = C / s;  // lattice extent
    const int K = static_cast<int>(B.taps.size());
    const int A = B.anchor;

    // Coset representatives from the tree are not reduced mod the step, so
    // every site address wraps; R and C are multiples of 2s, which keeps
    // the (p+q) parity classes consistent under wrapping.
    auto idx = [&](int p, int q) -> std::pair<int, int> {
        return {wrap(L.ci + p * s, R), wrap(L.cj + q * s, C)};
    };

    // scale (inverse runs it first, reversed)
    auto apply_scale = [&](bool inv) {
        for (int p = 0; p < P; ++p)
            for (int q = 0; q < Q; ++q) {
                auto [i, j] = idx(p, q);
                bool even = ((p + q) & 1) == 0;
                double f = even ? kSqrt2 : 1.0 / kSqrt2;
                W(i, j) *= inv ? 1.0 / f : f;
            }
    };

    // predict: scratch D over even sites along (s,-s), then combine along (s,s)
    auto apply_predict = [&](double sign) {
        for (int p = 0; p < P; ++p)
            for (int q = (p & 1); q < Q; q += 2) {  // even sites: p+q even
                auto [i, j] = idx(p, q);
                double acc = 0.0;
                for (int k = 0; k < K; ++k) {
                    int b = k - A;
                    acc += B.taps[k] * W(wrap(i + b * s, R), wrap(j - b * s, C));
                }
                scratch(i, j) = acc;
            }
        for (int p = 0; p < P; ++p)
            for (int q = 1 - (p & 1); q < Q; q += 2) {  // odd sites: p+q odd
                auto [i, j] = idx(p, q);
                double acc = 0.0;
                for (int k = 0; k < K; ++k) {
                    int a = k - A;
                    acc += B.taps[k] * scratch(wrap(i + (a - 1) * s, R), wrap(j + a * s, C));
                }
                W(i, j) += sign * acc;
            }
    };

    // update: scratch E over odd sites along (s,-s) reversed, combine along (s,s)
    auto apply_update = [&](double sign) {
        for (int p = 0; p < P; ++p)
            for (int q = 1 - (p & 1); q < Q; q += 2) {  // odd sites
                auto [i, j] = idx(p, q);
                double acc = 0.0;
                for (int k = 0; k < K; ++k) {
                    int b = k - A;
                    acc += B.taps[k] * W(wrap(i - b * s, R), wrap(j + b * s, C));
                }
                scratch(i, j) = acc;
            }
        for (int p = 0; p < P; ++p)
            for (int q = (p & 1); q < Q; q += 2) {  // even sites
                auto [i, j] = idx(p, q);
                double acc = 0.0;
                for (int k = 0; k < K; ++k) {
                    int a = k - A;
                    acc += B.taps[k] * scratch(wrap(i + (1 - a) * s, R), wrap(j - a * s, C));
                }
                W(i, j) += sign * 0.5 * acc;
            }
    };

    if (forward) {
        apply_predict(-1.0);
        apply_update(+1.0);
        apply_scale(false);
    } else {
        apply_scale(true);
        apply_update(-1.0);
        apply_predict(+1.0);
    }
}

// --- Odd-depth split: quincunx sublattice (step s, offset ci,cj; sites
// with p+q even) into two square sublattices of step 2s. Even child keeps
// offset (ci,cj); odd child is (ci+s, cj+s). Stencil offsets are
// ((2a-1)s, (2b-1)s), axis-aligned, so the two passes run per axis.
void split_quincunx(Grid2D& W, Grid2D& scratch, const Lattice& L, const FilterTaps& B,
                    bool forward) {
    const int R = W.rows(), C = W.cols();
    const int s = L.s, s2 = 2 * s;
    const int P = R / s2, Q = C / s2;  // child-lattice extent
    const int K = static_cast<int>(B.taps.size());
    const int A = B.anchor;

    auto apply_scale = [&](bool inv) {
        for (int p = 0; p < P; ++p)
            for (int q = 0; q < Q; ++q) {
                double fe = inv ? 1.0 / kSqrt2 : kSqrt2;
                double fo = inv ? kSqrt2 : 1.0 / kSqrt2;
                W(wrap(L.ci + p * s2, R), wrap(L.cj + q * s2, C)) *= fe;
                W(wrap(L.ci + s + p * s2, R), wrap(L.cj + s + q * s2, C)) *= fo;
            }
    };

    // predict: T over (even rows, odd cols) from row filtering, then
    // column-combine onto odd sites
    auto apply_predict = [&](double sign) {
        for (int p = 0; p < P; ++p) {
            int r = wrap(L.ci + p * s2, R);  // even row
            for (int q = 0; q < Q; ++q) {
                int j = wrap(L.cj + s + q * s2, C);  // odd col
                double acc = 0.0;
                for (int k = 0; k < K; ++k) {
                    int b = k - A;
                    acc += B.taps[k] * W(r, wrap(j + (2 * b - 1) * s, C));
                }
                scratch(r, j) = acc;
            }
        }
        for (int p = 0; p < P; ++p) {
            int i = wrap(L.ci + s + p * s2, R);  // odd row
            for (int q = 0; q < Q; ++q) {
                int j = wrap(L.cj + s + q * s2, C);
                double acc = 0.0;
                for (int k = 0; k < K; ++k) {
                    int a = k - A;
                    acc += B.taps[k] * scratch(wrap(i + (2 * a - 1) * s, R), j);
                }
                W(i, j) += sign * acc;
            }
        }
    };

    // update: S over (odd rows, even cols), then column-combine onto evens
    auto apply_update = [&](double sign) {
        for (int p = 0; p < P; ++p) {
            int r = wrap(L.ci + s + p * s2, R);  // odd row
            for (int q = 0; q < Q; ++q) {
                int j = wrap(L.cj + q * s2, C);  // even col
                double acc = 0.0;
                for (int k = 0; k < K; ++k) {
                    int b = k - A;
                    acc += B.taps[k] * W(r, wrap(j - (2 * b - 1) * s, C));
                }
                scratch(r, j) = acc;
            }
        }
        for (int p = 0; p < P; ++p) {
            int i = wrap(L.ci + p * s2, R);  // even row
            for (int q = 0; q < Q; ++q) {
                int j = wrap(L.cj + q * s2, C);
                double acc = 0.0;
                for (int k = 0; k < K; ++k) {
                    int a = k - A;
                    acc += B.taps[k] * scratch(wrap(i - (2 * a - 1) * s, R), j);
                }
                W(i, j) += sign * 0.5 * acc;
            }
        }
    };

    if (forward) {
        apply_predict(-1.0);
        apply_update(+1.0);
        apply_scale(false);
    } else {
        apply_scale(true);
        apply_update(-1.0);
        apply_predict(+1.0);
    }
}

// Node offsets per depth; index bits spell the path (even child = 0).
std::vector<std::vector<Lattice>> build_tree(int depth) {
    std::vector<std::vector<Lattice>> levels(depth + 1);
    levels[0] = {{0, 0, 1}};
    for (int d = 0; d < depth; ++d) {
        int s = 1 << (d / 2);
        int cs = 1 << ((d + 1) / 2);  // child step
        levels[d + 1].resize(levels[d].size() * 2);
        for (size_t k = 0; k < levels[d].size(); ++k) {
            const Lattice& n = levels[d][k];
            levels[d + 1][2 * k] = {n.ci, n.cj, cs};
            if (d % 2 == 0)
                levels[d + 1][2 * k + 1] = {n.ci + s, n.cj, cs};
            else
                levels[d + 1][2 * k + 1] = {n.ci + s, n.cj + s, cs};
        }
    }
    return levels;
}

void check_dims(int R, int C, int depth) {
    if (depth < 1 || depth > 4)
        throw std::invalid_argument("dfb: tree_depth must be in 1..4");
    int div = 1 << depth;
    if (R % div || C % div)
        throw std::invalid_argument("dfb: band sides must be divisible by 2^tree_depth");
}

}  // namespace

std::vector<Grid2D> dfb_analyze(const Grid2D& band, int tree_depth, const FilterTaps& ladder) {
    check_dims(band.rows(), band.cols(), tree_depth);
    const int R = band.rows(), C = band.cols();

    Grid2D W = band;
    Grid2D scratch(R, C);
    auto tree = build_tree(tree_depth);
    for (int d = 0; d < tree_depth; ++d) {
        int s = 1 << (d / 2);
        for (const Lattice& n : tree[d]) {
            Lattice L{n.ci, n.cj, s};
            if (d % 2 == 0)
                split_square(W, scratch, L, ladder, true);
            else
                split_quincunx(W, scratch, L, ladder, true);
        }
    }

    // export leaves
    std::vector<Grid2D> out;
    out.reserve(tree[tree_depth].size());
    const int s = 1 << (tree_depth / 2);
    for (const Lattice& leaf : tree[tree_depth]) {
        if (tree_depth % 2 == 0) {
            Grid2D sb(R / s, C / s);
            for (int m = 0; m < sb.rows(); ++m)
                for (int n = 0; n < sb.cols(); ++n)
                    sb(m, n) = W(wrap(leaf.ci + m * s, R), wrap(leaf.cj + n * s, C));
            out.push_back(std::move(sb));
        } else {
            // quincunx leaf: row m holds columns cj + s*(m mod 2) + 2s*n
            Grid2D sb(R / s, C / (2 * s));
            for (int m = 0; m < sb.rows(); ++m)
                for (int n = 0; n < sb.cols(); ++n)
                    sb(m, n) = W(wrap(leaf.ci + m * s, R),
                                 wrap(leaf.cj + s * (m & 1) + 2 * s * n, C));
            out.push_back(std::move(sb));
        }
    }
    return out;
}

Grid2D dfb_synthesize(const std::vector<Grid2D>& subbands, const FilterTaps& ladder) {
    size_t count = subbands.size();
    int depth = 0;
    while ((1u << depth) < count) ++depth;
    if (count < 2 || (1u << depth) != count || depth > 4)
        throw std::invalid_argument("dfb_synthesize: subband count must be 2^k, k in 1..4");
    for (const Grid2D& sb : subbands)
        if (!sb.same_shape(subbands[0]))
            throw std::invalid_argument("dfb_synthesize: subband shapes differ");

    const int s = 1 << (depth / 2);
    const int R = subbands[0].rows() * s;
    const int C = depth % 2 == 0 ? subbands[0].cols() * s : subbands[0].cols() * 2 * s;
    check_dims(R, C, depth);

    Grid2D W(R, C);
    Grid2D scratch(R, C);
    auto tree = build_tree(depth);
    for (size_t k = 0; k < count; ++k) {
        const Lattice& leaf = tree[depth][k];
        const Grid2D& sb = subbands[k];
        if (depth % 2 == 0) {
            for (int m = 0; m < sb.rows(); ++m)
                for (int n = 0; n < sb.cols(); ++n)
                    W(wrap(leaf.ci + m * s, R), wrap(leaf.cj + n * s, C)) = sb(m, n);
        } else {
            for (int m = 0; m < sb.rows(); ++m)
                for (int n = 0; n < sb.cols(); ++n)
                    W(wrap(leaf.ci + m * s, R), wrap(leaf.cj + s * (m & 1) + 2 * s * n, C)) =
                        sb(m, n);
        }
    }

    for (int d = depth - 1; d >= 0; --d) {
        int sd = 1 << (d / 2);
        for (const Lattice& n : tree[d]) {
            Lattice L{n.ci, n.cj, sd};
            if (d % 2 == 0)
                split_square(W, scratch, L, ladder, false);
            else
                split_quincunx(W, scratch, L, ladder, false);
        }
    }
    return W;
}

}  // namespace ctmark

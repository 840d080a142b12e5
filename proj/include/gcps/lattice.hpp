#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gcps {

/// Cylinder lattice {-N,...,N} x (Z/NZ)^{d-1}: open ends along axis 1,
/// periodic wrap in every other direction. Sites are enumerated row-major
/// with axis 1 slowest, so sweeps along the open axis are contiguous.
class Lattice {
public:
    Lattice(int half_width, int dim)
        : half_width_(half_width), dim_(dim) {
        if (half_width < 1) throw std::invalid_argument("Lattice: N must be >= 1");
        if (dim < 1) throw std::invalid_argument("Lattice: d must be >= 1");
        torus_volume_ = 1;
        for (int k = 1; k < dim; ++k) torus_volume_ *= static_cast<std::size_t>(half_width);
        site_count_ = static_cast<std::size_t>(2 * half_width + 1) * torus_volume_;
        build_topology();
    }

    int half_width() const { return half_width_; }
    int dim() const { return dim_; }
    std::size_t site_count() const { return site_count_; }
    std::size_t face_site_count() const { return torus_volume_; }

    /// coords[0] in [-N,N], coords[k] in [0,N) for k >= 1.
    std::size_t index_of(const std::vector<int>& coords) const {
        check_coords(coords);
        std::size_t idx = static_cast<std::size_t>(coords[0] + half_width_);
        for (int k = 1; k < dim_; ++k)
            idx = idx * static_cast<std::size_t>(half_width_) + static_cast<std::size_t>(coords[k]);
        return idx;
    }

    std::vector<int> coords_of(std::size_t idx) const {
        if (idx >= site_count_) throw std::out_of_range("Lattice: site index out of range");
        std::vector<int> c(static_cast<std::size_t>(dim_));
        for (int k = dim_ - 1; k >= 1; --k) {
            c[static_cast<std::size_t>(k)] = static_cast<int>(idx % static_cast<std::size_t>(half_width_));
            idx /= static_cast<std::size_t>(half_width_);
        }
        c[0] = static_cast<int>(idx) - half_width_;
        return c;
    }

    /// Macroscopic embedding x/N: first coordinate in [-1,1], torus
    /// coordinates in [0,1).
    std::vector<double> embed(std::size_t idx) const {
        auto c = coords_of(idx);
        std::vector<double> u(c.size());
        for (std::size_t k = 0; k < c.size(); ++k)
            u[k] = static_cast<double>(c[k]) / static_cast<double>(half_width_);
        return u;
    }

    /// -1 on the left face (x1 = -N), +1 on the right face, 0 in the interior.
    int face_of(std::size_t idx) const {
        int x1 = static_cast<int>(idx / torus_volume_) - half_width_;
        if (x1 == -half_width_) return -1;
        if (x1 == half_width_) return +1;
        return 0;
    }

    const std::vector<std::uint32_t>& neighbors(std::size_t idx) const {
        if (idx >= site_count_) throw std::out_of_range("Lattice: site index out of range");
        return neighbors_[idx];
    }

    /// Exchange pairs (x, x+e_k), one entry per directed generator term with
    /// x+e_k inside the lattice. Degenerate self-pairs on a size-1 torus are
    /// dropped; on a size-2 torus the same unordered pair appears twice,
    /// matching the generator sum.
    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& exchange_pairs() const {
        return pairs_;
    }

    const std::vector<std::uint32_t>& pairs_of_site(std::size_t idx) const {
        return pairs_of_site_[idx];
    }

    /// Sup-metric box Lambda_x^ell intersected with the lattice: truncated at
    /// the open ends, torus distance in directions 2..d.
    std::vector<std::uint32_t> box(std::size_t idx, int ell) const {
        if (ell < 0) throw std::invalid_argument("Lattice: box radius must be >= 0");
        auto c = coords_of(idx);
        std::vector<std::uint32_t> out;
        std::vector<int> y(c.size());
        box_rec(c, y, 0, ell, out);
        return out;
    }

private:
    void check_coords(const std::vector<int>& c) const {
        if (static_cast<int>(c.size()) != dim_)
            throw std::invalid_argument("Lattice: wrong coordinate dimension");
        if (c[0] < -half_width_ || c[0] > half_width_)
            throw std::out_of_range("Lattice: axis-1 coordinate out of range");
        for (int k = 1; k < dim_; ++k)
            if (c[static_cast<std::size_t>(k)] < 0 || c[static_cast<std::size_t>(k)] >= half_width_)
                throw std::out_of_range("Lattice: torus coordinate out of range");
    }

    void build_topology() {
        neighbors_.assign(site_count_, {});
        pairs_of_site_.assign(site_count_, {});
        for (std::size_t idx = 0; idx < site_count_; ++idx) {
            auto c = coords_of(idx);
            // axis 1, open ends
            for (int s : {-1, +1}) {
                int x1 = c[0] + s;
                if (x1 < -half_width_ || x1 > half_width_) continue;
                auto cc = c;
                cc[0] = x1;
                neighbors_[idx].push_back(static_cast<std::uint32_t>(index_of(cc)));
            }
            // torus directions
            for (int k = 1; k < dim_; ++k) {
                for (int s : {-1, +1}) {
                    auto cc = c;
                    cc[static_cast<std::size_t>(k)] =
                        ((c[static_cast<std::size_t>(k)] + s) % half_width_ + half_width_) % half_width_;
                    std::uint32_t y = static_cast<std::uint32_t>(index_of(cc));
                    if (y == idx) continue;  // size-1 torus
                    bool dup = false;
                    for (auto n : neighbors_[idx]) dup = dup || (n == y);
                    if (!dup) neighbors_[idx].push_back(y);
                }
            }
        }
        // directed generator terms (x, x+e_k)
        for (std::size_t idx = 0; idx < site_count_; ++idx) {
            auto c = coords_of(idx);
            if (c[0] + 1 <= half_width_) {
                auto cc = c;
                cc[0] = c[0] + 1;
                add_pair(idx, index_of(cc));
            }
            for (int k = 1; k < dim_; ++k) {
                auto cc = c;
                cc[static_cast<std::size_t>(k)] = (c[static_cast<std::size_t>(k)] + 1) % half_width_;
                std::size_t y = index_of(cc);
                if (y != idx) add_pair(idx, y);
            }
        }
    }

    void add_pair(std::size_t a, std::size_t b) {
        std::uint32_t pid = static_cast<std::uint32_t>(pairs_.size());
        pairs_.emplace_back(static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b));
        pairs_of_site_[a].push_back(pid);
        pairs_of_site_[b].push_back(pid);
    }

    void box_rec(const std::vector<int>& center, std::vector<int>& y, int k, int ell,
                 std::vector<std::uint32_t>& out) const {
        if (k == dim_) {
            out.push_back(static_cast<std::uint32_t>(index_of(y)));
            return;
        }
        if (k == 0) {
            int lo = std::max(-half_width_, center[0] - ell);
            int hi = std::min(half_width_, center[0] + ell);
            for (int v = lo; v <= hi; ++v) {
                y[0] = v;
                box_rec(center, y, 1, ell, out);
            }
        } else if (2 * ell + 1 >= half_width_) {
            for (int v = 0; v < half_width_; ++v) {
                y[static_cast<std::size_t>(k)] = v;
                box_rec(center, y, k + 1, ell, out);
            }
        } else {
            for (int off = -ell; off <= ell; ++off) {
                int v = ((center[static_cast<std::size_t>(k)] + off) % half_width_ + half_width_) % half_width_;
                y[static_cast<std::size_t>(k)] = v;
                box_rec(center, y, k + 1, ell, out);
            }
        }
    }

    int half_width_;
    int dim_;
    std::size_t torus_volume_ = 1;
    std::size_t site_count_ = 0;
    std::vector<std::vector<std::uint32_t>> neighbors_;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs_;
    std::vector<std::vector<std::uint32_t>> pairs_of_site_;
};

/// Per-site state: 0 empty, 1 wild, 2 sterile, 3 mixed.
using Configuration = std::vector<std::uint8_t>;

inline std::uint8_t encode_state(int xi, int omega) {
    if ((xi != 0 && xi != 1) || (omega != 0 && omega != 1))
        throw std::invalid_argument("encode_state: bits must be 0 or 1");
    return static_cast<std::uint8_t>(2 * omega + xi);
}

inline std::pair<int, int> decode_state(std::uint8_t state) {
    if (state > 3) throw std::invalid_argument("decode_state: state must be in {0,1,2,3}");
    return {state & 1, state >> 1};
}

/// Indicator eta_i(x) for i in {0,1,2,3}.
inline int indicator(std::uint8_t state, int i) { return state == i ? 1 : 0; }

}  // namespace gcps

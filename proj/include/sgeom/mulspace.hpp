#ifndef SGEOM_MULSPACE_HPP
#define SGEOM_MULSPACE_HPP

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "sgeom/grassmann.hpp"
#include "sgeom/linalg.hpp"
#include "sgeom/partitions.hpp"
#include "sgeom/ratfunc.hpp"

namespace sgeom {

/// k-multilinear space: one axis dimension per nonempty subset of {1..k}.
struct CubeSpace {
    int degree = 0;
    std::map<IndexMask, int> dims; // keys exactly the nonempty subsets

    CubeSpace() = default;

    explicit CubeSpace(int k) : degree(k) {
        for (IndexMask m = 1; m < (IndexMask(1) << k); ++m) dims[m] = 0;
    }

    static CubeSpace uniform(int k, int d) {
        CubeSpace c(k);
        for (auto& [m, dim] : c.dims) dim = d;
        return c;
    }

    int dim(IndexMask m) const {
        auto it = dims.find(m);
        if (it == dims.end()) throw dimension_error("axis outside the cube");
        return it->second;
    }

    void set_dim(IndexMask m, int d) {
        if (dims.find(m) == dims.end()) throw dimension_error("axis outside the cube");
        dims[m] = d;
    }

    bool purely_even() const {
        for (const auto& [m, d] : dims)
            if (!mask_even(m) && d != 0) return false;
        return true;
    }

    bool operator==(const CubeSpace& o) const { return degree == o.degree && dims == o.dims; }
    bool operator!=(const CubeSpace& o) const { return !(*this == o); }

    friend CubeSpace product(const CubeSpace& a, const CubeSpace& b) {
        if (a.degree != b.degree) throw dimension_error("cube degree mismatch");
        CubeSpace c(a.degree);
        for (auto& [m, d] : c.dims) d = a.dim(m) + b.dim(m);
        return c;
    }
};

/// Point of the total space: one vector per axis.
using CubePoint = std::map<IndexMask, RatVector>;

/// Canonical partition key: blocks as masks, even-cardinality blocks first,
/// each class ordered by least element.
using PartitionKey = std::vector<IndexMask>;

inline PartitionKey partition_key(const Partition& p, int generator_count) {
    PartitionKey key;
    for (const auto& b : p.blocks()) key.push_back(indices_to_mask(b, generator_count));
    return key;
}

inline Partition key_to_partition(const PartitionKey& key) {
    std::vector<IndexSet> blocks;
    for (IndexMask m : key) blocks.push_back(mask_to_indices(m));
    return Partition(std::move(blocks));
}

inline int key_sign(const PartitionKey& key) { return partition_sign(key_to_partition(key)); }

/// Multilinear coefficient tensor: arguments indexed by the partition blocks
/// in key order, output by the target axis. Entries are rational functions of
/// the base coordinates (constant morphisms have base arity zero).
struct CubeTensor {
    std::vector<int> arg_dims;
    int out_dim = 0;
    std::vector<RatFunc> entries; // index: ((a_1 d_2 + a_2) d_3 + ...) * out + o

    CubeTensor() = default;
    CubeTensor(std::vector<int> dims, int out, int base_arity)
        : arg_dims(std::move(dims)), out_dim(out) {
        std::size_t total = static_cast<std::size_t>(out_dim);
        for (int d : arg_dims) total *= static_cast<std::size_t>(d);
        entries.assign(total, RatFunc(base_arity));
    }

    std::size_t offset(const std::vector<int>& args, int out) const {
        std::size_t o = 0;
        for (std::size_t i = 0; i < arg_dims.size(); ++i)
            o = o * static_cast<std::size_t>(arg_dims[i]) + static_cast<std::size_t>(args[i]);
        return o * static_cast<std::size_t>(out_dim) + static_cast<std::size_t>(out);
    }

    const RatFunc& at(const std::vector<int>& args, int out) const {
        return entries[offset(args, out)];
    }
    RatFunc& at(const std::vector<int>& args, int out) { return entries[offset(args, out)]; }

    bool is_zero() const {
        for (const auto& e : entries)
            if (!e.is_zero()) return false;
        return true;
    }

    bool operator==(const CubeTensor& o) const {
        return arg_dims == o.arg_dims && out_dim == o.out_dim && entries == o.entries;
    }
};

/// Morphism of k-multilinear spaces as a partition-indexed family of
/// multilinear coefficient tensors; absent partitions are zero.
struct CubeMorphism {
    CubeSpace source, target;
    int base_arity = 0; // 0 for constant morphisms
    std::map<PartitionKey, CubeTensor> family;

    CubeMorphism() = default;
    CubeMorphism(CubeSpace src, CubeSpace tgt, int arity = 0)
        : source(std::move(src)), target(std::move(tgt)), base_arity(arity) {
        if (source.degree != target.degree) throw dimension_error("cube degree mismatch");
    }

    static CubeMorphism identity(const CubeSpace& space, int arity = 0) {
        CubeMorphism m(space, space, arity);
        for (const auto& [mask, d] : space.dims) {
            if (d == 0) continue;
            CubeTensor t({d}, d, arity);
            for (int i = 0; i < d; ++i) t.at({i}, i) = RatFunc::constant(arity, Rational(1));
            m.family.emplace(PartitionKey{mask}, std::move(t));
        }
        return m;
    }

    IndexMask key_union(const PartitionKey& key) const {
        IndexMask u = 0;
        for (IndexMask m : key) u |= m;
        return u;
    }

    void set(const PartitionKey& key, CubeTensor t) {
        IndexMask total = key_union(key);
        std::vector<int> expect;
        int card = 0;
        for (IndexMask m : key) {
            expect.push_back(source.dim(m));
            card += mask_card(m);
        }
        if (card != mask_card(total)) throw domain_error("partition blocks overlap");
        if (t.arg_dims != expect || t.out_dim != target.dim(total))
            throw dimension_error("tensor shape does not match the axes");
        if (t.is_zero())
            family.erase(key);
        else
            family[key] = std::move(t);
    }

    const CubeTensor* find(const PartitionKey& key) const {
        auto it = family.find(key);
        return it == family.end() ? nullptr : &it->second;
    }

    bool operator==(const CubeMorphism& o) const {
        return source == o.source && target == o.target && base_arity == o.base_arity &&
               family == o.family;
    }
    bool operator!=(const CubeMorphism& o) const { return !(*this == o); }

    /// Specialize base-parametrized entries at a base point.
    CubeMorphism at_base(const RatVector& x) const {
        CubeMorphism out(source, target, 0);
        for (const auto& [key, tensor] : family) {
            CubeTensor t(tensor.arg_dims, tensor.out_dim, 0);
            for (std::size_t i = 0; i < tensor.entries.size(); ++i)
                t.entries[i] = RatFunc::constant(0, tensor.entries[i].eval(x));
            if (!t.is_zero()) out.family.emplace(key, std::move(t));
        }
        return out;
    }

    /// Substitutes a base transition into every entry.
    CubeMorphism precompose_base(const RationalMap& phi) const {
        if (phi.codim() != base_arity) throw dimension_error("base map shape mismatch");
        CubeMorphism out(source, target, phi.arity());
        for (const auto& [key, tensor] : family) {
            CubeTensor t(tensor.arg_dims, tensor.out_dim, phi.arity());
            for (std::size_t i = 0; i < tensor.entries.size(); ++i)
                t.entries[i] = tensor.entries[i].substitute(phi.comps());
            if (!t.is_zero()) out.family.emplace(key, std::move(t));
        }
        return out;
    }
};

namespace detail {

inline bool next_args(std::vector<int>& args, const std::vector<int>& dims) {
    for (std::size_t i = args.size(); i-- > 0;) {
        if (++args[i] < dims[i]) return true;
        args[i] = 0;
    }
    return false;
}

} // namespace detail

/// Applies a constant morphism to a total-space point:
/// (f v)_I = sum over partitions nu of I of f^nu(v_nu).
inline CubePoint cube_apply(const CubeMorphism& f, const CubePoint& v) {
    if (f.base_arity != 0) throw domain_error("evaluate the base parameter first");
    for (const auto& [mask, vec] : v)
        if (static_cast<int>(vec.size()) != f.source.dim(mask))
            throw dimension_error("point component dimension mismatch");
    CubePoint out;
    for (const auto& [mask, d] : f.target.dims)
        if (d > 0) out[mask] = zero_vector(d);
    for (const auto& [key, tensor] : f.family) {
        IndexMask total = f.key_union(key);
        RatVector acc = zero_vector(tensor.out_dim);
        // contract with the argument vectors
        std::vector<const RatVector*> args;
        bool missing = false;
        for (IndexMask m : key) {
            auto it = v.find(m);
            if (it == v.end() || vector_is_zero(it->second)) {
                missing = true;
                break;
            }
            args.push_back(&it->second);
        }
        if (missing) continue;
        std::vector<int> idx(key.size(), 0);
        bool more = true;
        while (more) {
            Rational coeff(1);
            for (std::size_t i = 0; i < idx.size(); ++i)
                coeff *= (*args[i])[static_cast<std::size_t>(idx[i])];
            if (sgn(coeff) != 0)
                for (int o = 0; o < tensor.out_dim; ++o)
                    acc[static_cast<std::size_t>(o)] +=
                        coeff * tensor.at(idx, o).constant_value();
            more = !idx.empty() && detail::next_args(idx, tensor.arg_dims);
            if (idx.empty()) more = false;
        }
        auto& slot = out[total];
        for (std::size_t i = 0; i < slot.size(); ++i) slot[i] += acc[i];
    }
    // canonical sparse form
    for (auto it = out.begin(); it != out.end();) {
        if (vector_is_zero(it->second))
            it = out.erase(it);
        else
            ++it;
    }
    return out;
}

/// Composition of cube morphisms:
/// (g o f)^nu = sum over coarser omega of g^omega(f^{omega_1|nu}, ...).
inline CubeMorphism cube_compose(const CubeMorphism& g, const CubeMorphism& f) {
    if (!(f.target == g.source)) throw dimension_error("cube composition space mismatch");
    if (g.base_arity != f.base_arity && g.base_arity != 0 && f.base_arity != 0)
        throw dimension_error("base arity mismatch");
    const int arity = std::max(g.base_arity, f.base_arity);
    CubeMorphism h(f.source, g.target, arity);

    for (const auto& [mask, dtot] : f.source.dims) {
        for (const auto& nu : enumerate_partitions(mask_to_indices(mask))) {
            PartitionKey nu_key = partition_key(nu, 32);
            std::vector<int> arg_dims;
            for (IndexMask m : nu_key) arg_dims.push_back(f.source.dim(m));
            bool empty_axis = false;
            for (int d : arg_dims)
                if (d == 0) empty_axis = true;
            if (empty_axis || g.target.dim(mask) == 0) continue;
            CubeTensor acc(arg_dims, g.target.dim(mask), arity);
            bool any = false;

            for (const auto& omega : coarser_of(nu)) {
                PartitionKey omega_key = partition_key(omega, 32);
                const CubeTensor* gt = g.find(omega_key);
                if (!gt) continue;
                auto ref = refinement(omega, nu);
                // induced partitions, one per omega block in omega key order
                std::vector<PartitionKey> induced;
                std::vector<const CubeTensor*> fts;
                bool dead = false;
                for (std::size_t bi = 0; bi < omega_key.size(); ++bi) {
                    PartitionKey ik = partition_key(ref.induced[bi], 32);
                    const CubeTensor* ft = f.find(ik);
                    if (!ft) {
                        dead = true;
                        break;
                    }
                    induced.push_back(std::move(ik));
                    fts.push_back(ft);
                }
                if (dead) continue;
                any = true;

                // positions of each induced block inside nu_key
                std::vector<std::vector<std::size_t>> slots(omega_key.size());
                for (std::size_t bi = 0; bi < omega_key.size(); ++bi)
                    for (IndexMask m : induced[bi])
                        slots[bi].push_back(static_cast<std::size_t>(
                            std::find(nu_key.begin(), nu_key.end(), m) - nu_key.begin()));

                // contract: out_args over nu blocks, inner over omega axes
                std::vector<int> out_idx(nu_key.size(), 0);
                bool more = true;
                while (more) {
                    // value of each f^{omega_i|nu} column at these arguments
                    // is a vector over the middle axis; contract with g
                    std::vector<std::vector<RatFunc>> mids(omega_key.size());
                    for (std::size_t bi = 0; bi < omega_key.size(); ++bi) {
                        const CubeTensor& ft = *fts[bi];
                        std::vector<int> fargs;
                        for (std::size_t s : slots[bi]) fargs.push_back(out_idx[s]);
                        std::vector<RatFunc> col;
                        col.reserve(static_cast<std::size_t>(ft.out_dim));
                        for (int o = 0; o < ft.out_dim; ++o) {
                            RatFunc e = ft.at(fargs, o);
                            if (f.base_arity != arity) e = e.with_nvars(arity);
                            col.push_back(std::move(e));
                        }
                        mids[bi] = std::move(col);
                    }
                    std::vector<int> gi(omega_key.size(), 0);
                    std::vector<int> gdims;
                    for (IndexMask m : omega_key) gdims.push_back(g.source.dim(m));
                    bool gmore = true;
                    while (gmore) {
                        RatFunc coeff = RatFunc::constant(arity, Rational(1));
                        bool zero = false;
                        for (std::size_t bi = 0; bi < gi.size() && !zero; ++bi) {
                            const RatFunc& c = mids[bi][static_cast<std::size_t>(gi[bi])];
                            if (c.is_zero())
                                zero = true;
                            else
                                coeff *= c;
                        }
                        if (!zero) {
                            for (int o = 0; o < acc.out_dim; ++o) {
                                RatFunc ge = gt->at(gi, o);
                                if (g.base_arity != arity) ge = ge.with_nvars(arity);
                                if (!ge.is_zero())
                                    acc.at(out_idx, o) = acc.at(out_idx, o) + coeff * ge;
                            }
                        }
                        gmore = !gi.empty() && detail::next_args(gi, gdims);
                        if (gi.empty()) gmore = false;
                    }
                    more = !out_idx.empty() && detail::next_args(out_idx, arg_dims);
                    if (out_idx.empty()) more = false;
                }
            }
            if (any && !acc.is_zero()) h.family.emplace(std::move(nu_key), std::move(acc));
        }
    }
    return h;
}

struct CubeInversion {
    bool invertible = false;
    std::optional<CubeMorphism> inverse;
};

/// Invertibility criterion: every length-one tensor is a bijection. The
/// inverse is built inductively along coarsenings; non-invertibility is a
/// result, not an error.
inline CubeInversion cube_invert(const CubeMorphism& f) {
    CubeInversion res;
    // length-one blocks must be square and invertible
    std::map<IndexMask, Matrix<RatFunc>> inverses;
    for (const auto& [mask, d] : f.source.dims) {
        if (f.target.dim(mask) != d) return res;
        if (d == 0) continue;
        Matrix<RatFunc> m(static_cast<std::size_t>(d),
                          std::vector<RatFunc>(static_cast<std::size_t>(d), RatFunc(f.base_arity)));
        const CubeTensor* t = f.find(PartitionKey{mask});
        if (!t) return res;
        for (int i = 0; i < d; ++i)
            for (int o = 0; o < d; ++o)
                m[static_cast<std::size_t>(o)][static_cast<std::size_t>(i)] = t->at({i}, o);
        auto inv = matrix_inverse(m);
        if (!inv) return res;
        inverses.emplace(mask, std::move(*inv));
    }
    res.invertible = true;

    CubeMorphism g(f.target, f.source, f.base_arity);
    for (const auto& [mask, inv] : inverses) {
        int d = f.source.dim(mask);
        CubeTensor t({d}, d, f.base_arity);
        for (int i = 0; i < d; ++i)
            for (int o = 0; o < d; ++o)
                t.at({i}, o) = inv[static_cast<std::size_t>(o)][static_cast<std::size_t>(i)];
        g.family.emplace(PartitionKey{mask}, std::move(t));
    }

    // by increasing length: g^nu composed from shorter coarser data
    for (const auto& [mask, dtot] : f.source.dims) {
        auto parts = enumerate_partitions(mask_to_indices(mask));
        std::sort(parts.begin(), parts.end(),
                  [](const Partition& a, const Partition& b) { return a.length() < b.length(); });
        for (const auto& nu : parts) {
            if (nu.length() < 2) continue;
            PartitionKey nu_key = partition_key(nu, 32);
            std::vector<int> arg_dims;
            bool empty_axis = false;
            for (IndexMask m : nu_key) {
                arg_dims.push_back(f.target.dim(m));
                if (f.target.dim(m) == 0) empty_axis = true;
            }
            if (empty_axis || f.source.dim(mask) == 0) continue;

            // requirement: sum over omega <= nu of g^omega(f-blocks) = 0,
            // with the omega = nu term g^nu(f^{nu_1}, ..., f^{nu_l})
            CubeMorphism g_partial = g; // strictly coarser data already final
            g_partial.family.erase(nu_key);
            CubeMorphism probe = cube_compose(g_partial, f);
            const CubeTensor* rest = probe.find(nu_key);
            if (!rest) continue; // nothing to cancel
            // g^nu = -rest composed with the per-block inverses
            CubeTensor t(arg_dims, f.source.dim(mask), f.base_arity);
            std::vector<int> idx(arg_dims.size(), 0);
            bool more = !idx.empty();
            while (more) {
                // multiply rest entry by product of inverse matrices applied
                // per argument slot
                for (int o = 0; o < t.out_dim; ++o) {
                    RatFunc acc(f.base_arity);
                    // iterate over inner indices of rest
                    std::vector<int> inner(arg_dims.size(), 0);
                    std::vector<int> inner_dims;
                    for (IndexMask m : nu_key) inner_dims.push_back(f.source.dim(m));
                    bool imore = true;
                    while (imore) {
                        RatFunc coeff = RatFunc::constant(f.base_arity, Rational(1));
                        bool zero = false;
                        for (std::size_t bi = 0; bi < nu_key.size() && !zero; ++bi) {
                            const auto& inv = inverses.at(nu_key[bi]);
                            const RatFunc& c = inv[static_cast<std::size_t>(inner[bi])]
                                                  [static_cast<std::size_t>(idx[bi])];
                            if (c.is_zero())
                                zero = true;
                            else
                                coeff *= c;
                        }
                        if (!zero) {
                            const RatFunc& r = rest->at(inner, o);
                            if (!r.is_zero()) acc += coeff * r;
                        }
                        imore = detail::next_args(inner, inner_dims);
                    }
                    t.at(idx, o) = -acc;
                }
                more = detail::next_args(idx, arg_dims);
            }
            if (!t.is_zero()) g.family.emplace(std::move(nu_key), std::move(t));
        }
    }
    res.inverse = std::move(g);
    return res;
}

/// Closure of P under the disjoint-union product of the commuting nilpotent
/// index algebra.
inline bool subalgebra_closed(const std::set<IndexMask>& p) {
    for (IndexMask a : p)
        for (IndexMask b : p)
            if (!(a & b) && p.find(a | b) == p.end()) return false;
    return true;
}

inline CubeSpace cube_restrict_space(const CubeSpace& space, const std::set<IndexMask>& p) {
    CubeSpace out(space.degree);
    for (const auto& [m, d] : space.dims) out.dims[m] = p.count(m) ? d : 0;
    return out;
}

/// Restriction to a subalgebra-closed subset of axes; entries with any block
/// outside P vanish.
inline CubeMorphism cube_restrict(const CubeMorphism& f, const std::set<IndexMask>& p) {
    if (!subalgebra_closed(p)) throw domain_error("axis subset is not subalgebra-closed");
    CubeMorphism out(cube_restrict_space(f.source, p), cube_restrict_space(f.target, p),
                     f.base_arity);
    for (const auto& [key, tensor] : f.family) {
        bool keep = true;
        for (IndexMask m : key)
            if (!p.count(m)) keep = false;
        if (keep) out.family.emplace(key, tensor);
    }
    return out;
}

/// Degree truncation: keep the axes inside {1..n}, re-indexed as a degree-n
/// cube.
inline CubeSpace cube_truncate_space(const CubeSpace& space, int n) {
    CubeSpace out(n);
    for (auto& [m, d] : out.dims) d = space.dim(m);
    return out;
}

inline CubeMorphism cube_truncate(const CubeMorphism& f, int n) {
    CubeMorphism out(cube_truncate_space(f.source, n), cube_truncate_space(f.target, n),
                     f.base_arity);
    const IndexMask bound = IndexMask(1) << n;
    for (const auto& [key, tensor] : f.family) {
        bool keep = true;
        for (IndexMask m : key)
            if (m >= bound) keep = false;
        if (keep) out.family.emplace(key, tensor);
    }
    return out;
}

/// The minus functor on purely even cubes: entries scaled by the partition
/// sign. Involutive and functorial.
inline CubeMorphism minus_functor(const CubeMorphism& f) {
    if (!f.source.purely_even() || !f.target.purely_even())
        throw domain_error("minus functor needs purely even cubes");
    CubeMorphism out(f.source, f.target, f.base_arity);
    for (const auto& [key, tensor] : f.family) {
        int s = key_sign(key);
        CubeTensor t = tensor;
        if (s < 0)
            for (auto& e : t.entries) e = -e;
        out.family.emplace(key, std::move(t));
    }
    return out;
}

/// Product morphism acting blockwise on the product cube.
inline CubeMorphism cube_product(const CubeMorphism& f, const CubeMorphism& g) {
    if (f.base_arity != g.base_arity) throw dimension_error("base arity mismatch");
    CubeMorphism out(product(f.source, g.source), product(f.target, g.target), f.base_arity);
    auto weave = [&](const CubeMorphism& part, bool second) {
        for (const auto& [key, tensor] : part.family) {
            std::vector<int> arg_dims;
            for (IndexMask m : key) arg_dims.push_back(out.source.dim(m));
            IndexMask total = part.key_union(key);
            CubeTensor t(arg_dims, out.target.dim(total), f.base_arity);
            std::vector<int> idx(key.size(), 0);
            bool more = !idx.empty();
            while (more) {
                // argument index in the product splits per block
                std::vector<int> local(key.size());
                bool in_range = true;
                for (std::size_t bi = 0; bi < key.size(); ++bi) {
                    int fd = f.source.dim(key[bi]);
                    int v = idx[bi];
                    if (!second) {
                        if (v >= fd) in_range = false;
                        local[bi] = v;
                    } else {
                        if (v < fd) in_range = false;
                        local[bi] = v - fd;
                    }
                }
                if (in_range) {
                    int off = second ? f.target.dim(total) : 0;
                    for (int o = 0; o < tensor.out_dim; ++o)
                        t.at(idx, o + off) = tensor.at(local, o);
                }
                more = detail::next_args(idx, arg_dims);
            }
            auto it = out.family.find(key);
            if (it == out.family.end())
                out.family.emplace(key, std::move(t));
            else {
                for (std::size_t i = 0; i < t.entries.size(); ++i)
                    if (!t.entries[i].is_zero()) it->second.entries[i] = t.entries[i];
            }
        }
    };
    weave(f, false);
    weave(g, true);
    return out;
}

} // namespace sgeom

#endif

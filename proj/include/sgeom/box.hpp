#ifndef SGEOM_BOX_HPP
#define SGEOM_BOX_HPP

#include <optional>
#include <vector>

#include "sgeom/rational.hpp"

namespace sgeom {

/// One rational interval; absent bounds mean unbounded on that side.
struct Interval {
    std::optional<Rational> lo, hi;
    bool lo_closed = true, hi_closed = true;

    bool contains(const Rational& x) const {
        if (lo) {
            int c = cmp(x, *lo);
            if (c < 0 || (c == 0 && !lo_closed)) return false;
        }
        if (hi) {
            int c = cmp(x, *hi);
            if (c > 0 || (c == 0 && !hi_closed)) return false;
        }
        return true;
    }

    bool operator==(const Interval& o) const {
        return lo == o.lo && hi == o.hi && lo_closed == o.lo_closed && hi_closed == o.hi_closed;
    }

    /// Intersection; nullopt when empty.
    std::optional<Interval> intersect(const Interval& o) const {
        Interval r;
        if (lo && o.lo) {
            int c = cmp(*lo, *o.lo);
            r.lo = c >= 0 ? lo : o.lo;
            r.lo_closed = c > 0 ? lo_closed : (c < 0 ? o.lo_closed : (lo_closed && o.lo_closed));
        } else {
            r.lo = lo ? lo : o.lo;
            r.lo_closed = lo ? lo_closed : o.lo_closed;
        }
        if (hi && o.hi) {
            int c = cmp(*hi, *o.hi);
            r.hi = c <= 0 ? hi : o.hi;
            r.hi_closed = c < 0 ? hi_closed : (c > 0 ? o.hi_closed : (hi_closed && o.hi_closed));
        } else {
            r.hi = hi ? hi : o.hi;
            r.hi_closed = hi ? hi_closed : o.hi_closed;
        }
        if (r.lo && r.hi) {
            int c = cmp(*r.lo, *r.hi);
            if (c > 0) return std::nullopt;
            if (c == 0 && !(r.lo_closed && r.hi_closed)) return std::nullopt;
        }
        return r;
    }

    /// g distinct interior sample values.
    RatVector samples(int g) const {
        RatVector out;
        if (lo && hi) {
            Rational width = *hi - *lo;
            for (int i = 1; i <= g; ++i) out.push_back(*lo + width * rat(i, g + 1));
        } else if (lo) {
            for (int i = 1; i <= g; ++i) out.push_back(*lo + rat(i));
        } else if (hi) {
            for (int i = 1; i <= g; ++i) out.push_back(*hi - rat(i));
        } else {
            for (int i = 1; i <= g; ++i) out.push_back(rat(2 * i - g - 1, 2));
        }
        return out;
    }
};

/// Per-coordinate rational box, or "all" (unbounded, any dimension). The
/// base-open-set datum that pins down an open subfunctor.
class DomainBox {
public:
    DomainBox() = default; // "all"
    explicit DomainBox(std::vector<Interval> ivals) : ivals_(std::move(ivals)) {}

    static DomainBox all() { return DomainBox(); }

    bool is_all() const { return !ivals_.has_value(); }
    const std::vector<Interval>& intervals() const { return *ivals_; }

    bool contains(const RatVector& x) const {
        if (!ivals_) return true;
        if (x.size() != ivals_->size()) throw dimension_error("point and box dimension mismatch");
        for (std::size_t i = 0; i < x.size(); ++i)
            if (!(*ivals_)[i].contains(x[i])) return false;
        return true;
    }

    bool operator==(const DomainBox& o) const { return ivals_ == o.ivals_; }

    /// Intersection of two boxes of the same dimension; nullopt when empty.
    std::optional<DomainBox> intersect(const DomainBox& o, int dim) const {
        if (is_all()) return o;
        if (o.is_all()) return *this;
        if (static_cast<int>(ivals_->size()) != dim ||
            static_cast<int>(o.ivals_->size()) != dim)
            throw dimension_error("box dimension mismatch");
        std::vector<Interval> out;
        for (int i = 0; i < dim; ++i) {
            auto iv = (*ivals_)[static_cast<std::size_t>(i)].intersect(
                (*o.ivals_)[static_cast<std::size_t>(i)]);
            if (!iv) return std::nullopt;
            out.push_back(*iv);
        }
        return DomainBox(std::move(out));
    }

    DomainBox concat(const DomainBox& o, int dim_this, int dim_other) const {
        if (is_all() && o.is_all()) return DomainBox();
        std::vector<Interval> iv;
        if (is_all())
            iv.assign(static_cast<std::size_t>(dim_this), Interval{});
        else
            iv = *ivals_;
        if (o.is_all())
            iv.insert(iv.end(), static_cast<std::size_t>(dim_other), Interval{});
        else
            iv.insert(iv.end(), o.ivals_->begin(), o.ivals_->end());
        return DomainBox(std::move(iv));
    }

    /// Leading dim-coordinate sub-box.
    DomainBox prefix(int dim) const {
        if (is_all()) return DomainBox();
        if (static_cast<std::size_t>(dim) > ivals_->size()) throw dimension_error("prefix too long");
        return DomainBox(std::vector<Interval>(ivals_->begin(), ivals_->begin() + dim));
    }

    /// Deterministic interior grid: `count` points for a dim-dimensional box.
    std::vector<RatVector> sample_points(int dim, int count) const {
        if (ivals_ && static_cast<int>(ivals_->size()) != dim)
            throw dimension_error("box dimension mismatch");
        std::vector<RatVector> out;
        if (dim == 0) {
            out.emplace_back();
            return out;
        }
        std::vector<RatVector> per_coord;
        for (int i = 0; i < dim; ++i) {
            Interval iv = ivals_ ? (*ivals_)[static_cast<std::size_t>(i)] : Interval{};
            per_coord.push_back(iv.samples(count));
        }
        for (int k = 0; k < count; ++k) {
            RatVector p;
            for (int i = 0; i < dim; ++i)
                p.push_back(per_coord[static_cast<std::size_t>(i)]
                                     [static_cast<std::size_t>((k + i) % count)]);
            out.push_back(std::move(p));
        }
        return out;
    }

private:
    std::optional<std::vector<Interval>> ivals_;
};

} // namespace sgeom

#endif

#include "koch/properties.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "koch/error.hpp"
#include "koch/numeric.hpp"

namespace koch {

namespace {

constexpr double kBallSlack = 1e-12;

// Points sorted by x for ball queries.
class BallIndex {
public:
    explicit BallIndex(std::span<const Point2> points) : points_(points), order_(points.size()) {
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) { return points_[a].x < points_[b].x; });
        xs_.reserve(order_.size());
        for (std::size_t k : order_) xs_.push_back(points_[k].x);
    }

    // Indices within the closed ball, in sample order.
    std::vector<std::size_t> query(Point2 c, double r) const {
        std::vector<std::size_t> out;
        const double reach = r + kBallSlack;
        auto it = std::lower_bound(xs_.begin(), xs_.end(), c.x - reach);
        for (auto k = static_cast<std::size_t>(it - xs_.begin()); k < xs_.size() && xs_[k] <= c.x + reach; ++k)
            if (dist(points_[order_[k]], c) <= reach) out.push_back(order_[k]);
        std::sort(out.begin(), out.end());
        return out;
    }

    std::span<const Point2> points() const { return points_; }

private:
    std::span<const Point2> points_;
    std::vector<std::size_t> order_;
    std::vector<double> xs_;
};

// Points of the largest ball around one center, sorted by distance so that every smaller closed
// ball is a prefix.
class Neighbourhood {
public:
    Neighbourhood(const BallIndex& index, Point2 center, double rmax) : center_(center) {
        for (std::size_t k : index.query(center, rmax)) pts_.push_back(index.points()[k]);
        std::stable_sort(pts_.begin(), pts_.end(), [&](Point2 a, Point2 b) { return dist(a, center_) < dist(b, center_); });
        for (const Point2& p : pts_) d_.push_back(dist(p, center_));
    }

    std::span<const Point2> ball(double rho) const {
        const auto n = static_cast<std::size_t>(std::upper_bound(d_.begin(), d_.end(), rho + kBallSlack) - d_.begin());
        return {pts_.data(), n};
    }

    // True when the ball holds a point other than the center itself.
    bool nontrivial(double rho) const {
        const auto b = ball(rho);
        return !b.empty() && d_[b.size() - 1] > 0.0;
    }

private:
    Point2 center_;
    std::vector<Point2> pts_;
    std::vector<double> d_;
};

bool is_strong(PropertyId p) { return p == PropertyId::vi || p == PropertyId::vii || p == PropertyId::viii; }
bool uses_neighbours(PropertyId p) {
    return p == PropertyId::ii || p == PropertyId::iv || p == PropertyId::v || p == PropertyId::vii || p == PropertyId::viii;
}
bool is_uniform(PropertyId p) { return p == PropertyId::v || p == PropertyId::viii; }

// Best line through x at the finest (or coarsest) radius whose ball holds a second point.
AffineLine reused_line(const Neighbourhood& nb, Point2 x, std::span<const double> radii, LinePolicy policy) {
    std::vector<double> order(radii.begin(), radii.end());
    if (policy == LinePolicy::finest) std::reverse(order.begin(), order.end());
    for (double rho : order)
        if (nb.nontrivial(rho)) return minmax_fit_through(nb.ball(rho), x).line;
    return AffineLine::through(x, 0.0);
}

struct PointCheck {
    std::optional<Witness> failure;
    std::size_t balls = 0;
};

// Flatness of every ball around x against every delta; the first failure is the witness.
PointCheck check_point(const Neighbourhood& nb, Point2 x, std::span<const double> radii, std::span<const double> deltas,
                       LineMode mode, const std::optional<AffineLine>& fixed_line) {
    PointCheck out;
    for (double rho : radii) {
        ++out.balls;
        if (!nb.nontrivial(rho)) continue;
        const auto ball = nb.ball(rho);
        AffineLine line;
        double width;
        if (fixed_line) {
            line = *fixed_line;
            width = max_distance_to_line(ball, line);
        } else {
            const LineFit fit = mode == LineMode::through_point ? minmax_fit_through(ball, x) : minmax_fit_free(ball);
            line = fit.line;
            width = fit.width;
        }
        const double beta = width / rho;
        for (double delta : deltas)
            if (beta > delta) {
                out.failure = Witness{x, rho, beta, delta, line};
                return out;
            }
    }
    return out;
}

void validate_radii(std::span<const double> radii) {
    if (radii.empty()) throw Error(ErrorKind::invalid_argument, "scale ladder must not be empty");
    for (std::size_t k = 0; k < radii.size(); ++k)
        if (!(radii[k] > 0.0) || !std::isfinite(radii[k]) || (k > 0 && !(radii[k] < radii[k - 1])))
            throw Error(ErrorKind::invalid_argument, "scale ladder must be positive and strictly decreasing");
}

}  // namespace

PropertyId parse_property(const std::string& text) {
    static const char* names[] = {"i", "ii", "iii", "iv", "v", "vi", "vii", "viii"};
    for (int k = 0; k < 8; ++k)
        if (text == names[k]) return static_cast<PropertyId>(k);
    throw Error(ErrorKind::parse, "unknown property '" + text + "' (expected i..viii)");
}

const char* to_string(PropertyId p) {
    static const char* names[] = {"i", "ii", "iii", "iv", "v", "vi", "vii", "viii"};
    return names[static_cast<int>(p)];
}

FlatnessProfile flatness_profile(std::span<const Point2> points, Point2 center, std::span<const double> radii,
                                 bool constrain_through_center) {
    validate_radii(radii);
    require_finite(center, "profile center");
    const BallIndex index(points);
    const Neighbourhood nb(index, center, radii.front());
    FlatnessProfile out;
    out.center = center;
    for (double rho : radii) {
        FlatnessEntry e;
        e.rho = rho;
        const auto ball = nb.ball(rho);
        e.count = ball.size();
        e.empty = !nb.nontrivial(rho);
        e.best_line = AffineLine::through(center, 0.0);
        if (!e.empty) {
            const LineFit through = minmax_fit_through(ball, center), free = minmax_fit_free(ball);
            e.beta_through = through.width / rho;
            e.beta_free = std::min(free.width, through.width) / rho;
            e.best_line = constrain_through_center ? through.line : free.line;
        }
        out.entries.push_back(e);
    }
    return out;
}

bool PropertyReport::holds() const { return contained && failures() == 0; }

std::size_t PropertyReport::failures() const {
    return static_cast<std::size_t>(std::count_if(centers.begin(), centers.end(), [](const CenterVerdict& c) { return !c.holds; }));
}

std::size_t PropertyReport::tested_balls() const {
    std::size_t n = 0;
    for (const auto& c : centers) n += c.tested_balls;
    return n;
}

PropertyReport check_property(std::span<const Point2> points, PropertyId property, double delta,
                              std::span<const Point2> centers, std::span<const double> radii,
                              const PropertyOptions& options) {
    if (points.empty()) throw Error(ErrorKind::invalid_argument, "property check needs sample points");
    if (!(delta > 0.0) || !std::isfinite(delta)) throw Error(ErrorKind::invalid_argument, "delta must be > 0");
    validate_radii(radii);
    for (const Point2& p : points) require_finite(p, "sample point");
    for (const Point2& c : centers) require_finite(c, "center");
    if (radii.back() < 4.0 * options.resolution)
        throw Error(ErrorKind::resolution, "smallest radius is below 4x the sample resolution");

    PropertyReport r;
    r.property = property;
    r.delta = delta;
    r.radii.assign(radii.begin(), radii.end());
    r.line_mode = options.line_mode == LineMode::through_point ? "through_point" : "free";
    r.line_policy = options.line_policy == LinePolicy::finest ? "finest" : "coarsest";
    if (options.shared_line) r.line_policy += "_shared";

    // Deltas tested: the ladder for (iii)/(iv), otherwise delta alone.
    std::vector<double> deltas{delta};
    if (property == PropertyId::iii || property == PropertyId::iv) {
        deltas = options.delta_ladder.empty() ? std::vector<double>{delta, delta / 2, delta / 4} : options.delta_ladder;
        for (double d : deltas)
            if (!(d > 0.0)) throw Error(ErrorKind::invalid_argument, "delta ladder entries must be > 0");
        r.delta_ladder = deltas;
    }

    // Radii tested: the uniform variants only look below rho0 and require containment.
    std::vector<double> tested(radii.begin(), radii.end());
    if (is_uniform(property)) {
        const double rho0 = options.rho0.value_or(radii.front());
        if (!(rho0 > 0.0)) throw Error(ErrorKind::invalid_argument, "rho0 must be > 0");
        r.rho0 = rho0;
        std::erase_if(tested, [rho0](double rho) { return rho > rho0 * (1.0 + 1e-12); });
        const Circle c = min_enclosing_circle(points);
        r.enclosing_radius = c.radius;
        r.contained = c.radius <= rho0 + kBallSlack;
    }

    const BallIndex index(points);
    const double reach = std::max(radii.front(), tested.empty() ? 0.0 : tested.front());
    const LineMode weak_mode = (property == PropertyId::ii || property == PropertyId::iv || property == PropertyId::v)
                                   ? options.line_mode : LineMode::through_point;

    for (const Point2& y : centers) {
        CenterVerdict v;
        v.center = y;
        // Tested points: y plus up to K sample points within the largest radius, spread evenly
        // through the sample order.
        std::vector<Point2> xs{y};
        if (uses_neighbours(property)) {
            const auto cand = index.query(y, radii.front());
            std::vector<std::size_t> others;
            for (std::size_t k : cand)
                if (!(points[k] == y)) others.push_back(k);
            const std::size_t take = std::min(options.neighbours, others.size());
            for (std::size_t j = 0; j < take; ++j) xs.push_back(points[others[j * others.size() / take]]);
        }
        const Neighbourhood ny(index, y, reach);
        std::optional<AffineLine> ly;
        if (is_strong(property)) {
            ly = reused_line(ny, y, tested, options.line_policy);
            v.reused_line = ly;
        }
        for (const Point2& x : xs) {
            const Neighbourhood nx(index, x, reach);
            std::optional<AffineLine> line;
            if (is_strong(property))
                line = (options.shared_line || x == y) ? ly : reused_line(nx, x, tested, options.line_policy);
            const PointCheck pc = check_point(nx, x, tested, deltas, is_strong(property) ? LineMode::through_point : weak_mode, line);
            ++v.tested_points;
            v.tested_balls += pc.balls;
            if (pc.failure) {
                v.holds = false;
                v.witness = pc.failure;
                break;
            }
        }
        r.centers.push_back(v);

        FlatnessProfile prof;
        prof.center = y;
        for (double rho : radii) {
            FlatnessEntry e;
            e.rho = rho;
            const auto ball = ny.ball(rho);
            e.count = ball.size();
            e.empty = !ny.nontrivial(rho);
            e.best_line = AffineLine::through(y, 0.0);
            if (!e.empty) {
                const LineFit through = minmax_fit_through(ball, y), free = minmax_fit_free(ball);
                e.beta_through = through.width / rho;
                e.beta_free = std::min(free.width, through.width) / rho;
                e.best_line = through.line;
            }
            prof.entries.push_back(e);
        }
        r.profiles.push_back(std::move(prof));
    }
    return r;
}

double recheck_witness(std::span<const Point2> points, const Witness& w) {
    std::vector<Point2> ball;
    for (const Point2& p : points)
        if (dist(p, w.center) <= w.rho + kBallSlack) ball.push_back(p);
    return max_distance_to_line(ball, w.line) / w.rho;
}

namespace {

nlohmann::json point_json(Point2 p) { return nlohmann::json::array({p.x, p.y}); }
nlohmann::json line_json(const AffineLine& l) { return {{"point", point_json(l.point)}, {"angle", l.angle}}; }

}  // namespace

nlohmann::json to_json(const PropertyReport& r) {
    nlohmann::json centers = nlohmann::json::array();
    for (const auto& c : r.centers) {
        nlohmann::json j = {{"center", point_json(c.center)},
                            {"tested_points", c.tested_points},
                            {"tested_balls", c.tested_balls}};
        if (c.holds) {
            j["verdict"] = "holds_at_all_tested_scales";
        } else {
            j["verdict"] = "fails_at";
            j["witness"] = {{"center", point_json(c.witness->center)},
                            {"rho", c.witness->rho},
                            {"beta", c.witness->beta},
                            {"delta", c.witness->delta},
                            {"line", line_json(c.witness->line)}};
        }
        if (c.reused_line) j["reused_line"] = line_json(*c.reused_line);
        centers.push_back(j);
    }
    nlohmann::json j = {{"property", to_string(r.property)},
                        {"delta", r.delta},
                        {"radii", r.radii},
                        {"line_mode", r.line_mode},
                        {"line_policy", r.line_policy},
                        {"sampled_centers", r.centers.size()},
                        {"tested_balls", r.tested_balls()},
                        {"failures", r.failures()},
                        {"contained", r.contained},
                        {"holds", r.holds()},
                        {"centers", centers}};
    if (!r.delta_ladder.empty()) j["delta_ladder"] = r.delta_ladder;
    if (r.rho0) j["rho0"] = *r.rho0;
    if (r.enclosing_radius) j["enclosing_radius"] = *r.enclosing_radius;
    return j;
}

std::string to_csv(const PropertyReport& r) {
    std::ostringstream os;
    os.precision(17);
    os << "center_x,center_y,rho,beta_through,beta_free,verdict\n";
    for (std::size_t k = 0; k < r.profiles.size(); ++k) {
        const auto& prof = r.profiles[k];
        const char* verdict = r.centers[k].holds ? "holds" : "fails";
        for (const auto& e : prof.entries)
            os << prof.center.x << ',' << prof.center.y << ',' << e.rho << ',' << e.beta_through << ',' << e.beta_free
               << ',' << verdict << '\n';
    }
    return os.str();
}

std::vector<LengthGrowth> local_finiteness_scan(std::span<const Point2> points, std::span<const double> weights,
                                                std::span<const Point2> centers, std::span<const double> radii) {
    if (weights.size() != points.size()) throw Error(ErrorKind::invalid_argument, "one weight per sample point required");
    validate_radii(radii);
    std::vector<LengthGrowth> out;
    for (const Point2& c : centers) {
        require_finite(c, "center");
        LengthGrowth g;
        g.center = c;
        std::vector<std::pair<double, double>> near;  // (distance, weight)
        for (std::size_t k = 0; k < points.size(); ++k) {
            const double d = dist(points[k], c);
            if (d <= radii.front() + kBallSlack) near.emplace_back(d, weights[k]);
        }
        std::sort(near.begin(), near.end());
        for (double rho : radii) {
            std::vector<double> w;
            for (const auto& [d, wt] : near)
                if (d <= rho + kBallSlack) w.push_back(wt);
            const double len = pairwise_sum(w);
            g.rows.push_back({rho, len, len / (2.0 * rho)});
        }
        g.diverging = g.rows.size() > 1;
        for (std::size_t k = 1; k < g.rows.size(); ++k)
            if (!(g.rows[k].ratio > g.rows[k - 1].ratio)) g.diverging = false;
        out.push_back(std::move(g));
    }
    return out;
}

DeltaLadderReport delta_ladder_check(std::span<const Point2> points, PropertyId base, std::span<const double> deltas,
                                     std::span<const Point2> centers,
                                     const std::function<std::vector<double>(double)>& scales_for_delta,
                                     const PropertyOptions& options) {
    if (base != PropertyId::i && base != PropertyId::ii)
        throw Error(ErrorKind::invalid_argument, "delta ladder checks run property i or ii");
    if (deltas.empty()) throw Error(ErrorKind::invalid_argument, "delta ladder must not be empty");
    for (std::size_t k = 1; k < deltas.size(); ++k)
        if (!(deltas[k] < deltas[k - 1])) throw Error(ErrorKind::invalid_argument, "delta ladder must be decreasing");
    DeltaLadderReport out;
    for (double d : deltas) {
        const std::vector<double> scales = scales_for_delta(d);
        out.reports.push_back(check_property(points, base, d, centers, scales, options));
        if (out.reports.back().holds()) out.smallest_holding = d;
    }
    return out;
}

}  // namespace koch

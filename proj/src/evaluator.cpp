#include "sscc/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <set>

#include "parallel.hpp"

namespace sscc::query {
namespace {

using Row = std::vector<EntityId>;

class Checker {
 public:
  Checker(const Dataset& d, CheckedPlan& plan) : d_(d), plan_(plan) {}

  void pipeline(const Pipeline& p, bool nested) {
    if (p.source.is_table()) {
      table(p.source.table);
    } else {
      pipeline(*p.source.nested, true);
    }
    bool joined = false;
    for (const Stage& s : p.stages) {
      if (joined && !std::holds_alternative<Head>(s)) {
        throw TypeCheckError("symmjoin", "only head may follow symmjoin");
      }
      std::visit([&](const auto& st) { stage(st, nested, joined); }, s);
    }
  }

 private:
  void table(const std::string& name) {
    if (!d_.find_table(name)) throw TypeCheckError(name, "unknown table '" + name + "'");
  }

  const Entity& ref(const std::string& name) {
    const auto hits = d_.entities_named(name);
    if (hits.empty()) throw TypeCheckError(name, "unknown ref \"" + name + "\"");
    if (hits.size() > 1) throw TypeCheckError(name, "ambiguous ref \"" + name + "\"");
    plan_.refs[name] = hits.front()->id;
    return *hits.front();
  }

  void limit(double v, const char* what) {
    if (!std::isfinite(v) || v < 0) {
      throw TypeCheckError(std::to_string(v), std::string(what) + " must be finite and non-negative");
    }
  }

  void stage(const Filter& f, bool, bool) {
    std::visit(
        [&](const auto& pred) {
          using T = std::decay_t<decltype(pred)>;
          if constexpr (std::is_same_v<T, SpatialPredicate>) {
            if (const auto* r = std::get_if<EntityRef>(&pred.target)) {
              const Entity& e = ref(r->name);
              if (pred.op == SpatialOp::kInside && !e.geometry.is_region()) {
                throw TypeCheckError(r->name, "kind mismatch: inside target \"" + r->name + "\" is a " +
                                                  std::string(to_string(e.geometry.kind())) +
                                                  ", not a region");
              }
            } else if (pred.op == SpatialOp::kInside) {
              throw TypeCheckError("POINT", "kind mismatch: inside target POINT is not a region");
            }
          } else if constexpr (std::is_same_v<T, DistancePredicate>) {
            if (const auto* r = std::get_if<EntityRef>(&pred.target)) ref(r->name);
            limit(pred.limit, "distance limit");
          }
        },
        f.predicate);
  }

  void stage(const Head&, bool, bool) {}

  void stage(const DistanceScan& s, bool, bool) {
    if (s.k < 1) throw TypeCheckError(std::to_string(s.k), "distancescan needs k >= 1");
  }

  void stage(const SymmJoin& j, bool nested, bool& joined) {
    if (nested) throw TypeCheckError("symmjoin", "symmjoin is not allowed inside a nested source");
    table(j.right_table);
    if (j.predicate.by_distance) limit(j.predicate.limit, "join distance");
    joined = true;
  }

  const Dataset& d_;
  CheckedPlan& plan_;
};

/// Single-column stream; `table` is set while the stream is still a whole table scan.
struct Stream {
  const Table* table = nullptr;
  std::vector<EntityId> ids;
  std::vector<Row> pairs;
  bool joined = false;
};

class Executor {
 public:
  Executor(const CheckedPlan& plan, const Dataset& d, const StrTree& tree, const ExecOptions& opts)
      : plan_(plan), d_(d), tree_(tree), opts_(opts) {}

  Stream run(const Pipeline& p) {
    Stream s;
    if (p.source.is_table()) {
      s.table = d_.find_table(p.source.table);
    } else {
      s = run(*p.source.nested);
    }
    for (const Stage& st : p.stages) {
      std::visit([&](const auto& x) { apply(s, x); }, st);
    }
    return s;
  }

  std::vector<EntityId> materialize(const Stream& s) const {
    if (!s.table) return s.ids;
    std::vector<EntityId> ids;
    ids.reserve(s.table->entities.size());
    for (const Entity& e : s.table->entities) ids.push_back(e.id);
    std::sort(ids.begin(), ids.end());
    return ids;
  }

 private:
  void cap(std::size_t n) const {
    if (n > opts_.row_cap) throw ExecutionError("result cap exceeded");
  }

  Geometry target(const RefExpr& r) const {
    if (const auto* e = std::get_if<EntityRef>(&r)) return d_.entity(plan_.refs.at(e->name)).geometry;
    const Point p = std::get<Point>(r);
    return Geometry::point(p.x, p.y);
  }

  bool in_stream_table(const Stream& s, EntityId id) const {
    return d_.find_entity(id)->table == s.table->name;
  }

  static bool attribute_matches(const AttributePredicate& a, const Entity& e) {
    const auto it = e.attributes.find(a.key);
    if (it == e.attributes.end()) return false;
    const std::string& raw = it->second;
    if (const auto* s = std::get_if<std::string>(&a.value)) {
      const int c = raw.compare(*s);
      return a.op == CompareOp::kEq ? c == 0 : a.op == CompareOp::kLt ? c < 0 : c > 0;
    }
    double v = 0;
    auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
    if (ec != std::errc() || ptr != raw.data() + raw.size()) return false;
    const double rhs = std::get<double>(a.value);
    return a.op == CompareOp::kEq ? v == rhs : a.op == CompareOp::kLt ? v < rhs : v > rhs;
  }

  void apply(Stream& s, const Filter& f) {
    std::function<bool(const Entity&)> keep;
    std::optional<BoundingBox> window;
    std::visit(
        [&](const auto& pred) {
          using T = std::decay_t<decltype(pred)>;
          if constexpr (std::is_same_v<T, SpatialPredicate>) {
            Geometry g = target(pred.target);
            window = g.bbox().expanded(kTolerance);
            if (pred.op == SpatialOp::kInside) {
              keep = [g](const Entity& e) { return inside(e.geometry, g); };
            } else {
              keep = [g](const Entity& e) { return intersects(e.geometry, g); };
            }
          } else if constexpr (std::is_same_v<T, DistancePredicate>) {
            Geometry g = target(pred.target);
            const double limit = pred.limit;
            window = g.bbox().expanded(limit);
            keep = [g, limit](const Entity& e) { return distance(e.geometry, g) < limit; };
          } else {
            keep = [pred](const Entity& e) { return attribute_matches(pred, e); };
          }
        },
        f.predicate);

    std::vector<EntityId> out;
    if (s.table && window) {
      tree_.visit_bbox(*window, [&](ItemId id) {
        if (in_stream_table(s, id) && keep(d_.entity(id))) out.push_back(id);
      });
      std::sort(out.begin(), out.end());
    } else {
      for (EntityId id : materialize(s)) {
        if (keep(d_.entity(id))) out.push_back(id);
      }
    }
    cap(out.size());
    s.table = nullptr;
    s.ids = std::move(out);
  }

  void apply(Stream& s, const Head& h) {
    if (s.joined) {
      if (s.pairs.size() > h.n) s.pairs.resize(h.n);
      return;
    }
    std::vector<EntityId> ids = materialize(s);
    if (ids.size() > h.n) ids.resize(h.n);
    s.table = nullptr;
    s.ids = std::move(ids);
  }

  void apply(Stream& s, const DistanceScan& ds) {
    const Geometry anchor = Geometry::point(ds.anchor.x, ds.anchor.y);
    std::vector<EntityId> out;
    if (s.table) {
      const Table* t = s.table;
      const auto hits = tree_.nearest_k(
          anchor, ds.k, [&](ItemId id) -> const Geometry& { return d_.entity(id).geometry; },
          std::numeric_limits<double>::infinity(),
          [&](ItemId id) { return d_.find_entity(id)->table != t->name; });
      for (const Neighbor& n : hits) out.push_back(n.item_id);
    } else {
      std::vector<std::pair<double, EntityId>> ranked;
      for (EntityId id : s.ids) ranked.emplace_back(distance(d_.entity(id).geometry, anchor), id);
      const std::size_t k = std::min<std::size_t>(ds.k, ranked.size());
      std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k), ranked.end());
      for (std::size_t i = 0; i < k; ++i) out.push_back(ranked[i].second);
    }
    s.table = nullptr;
    s.ids = std::move(out);
  }

  void apply(Stream& s, const SymmJoin& j) {
    const Table* right = d_.find_table(j.right_table);
    const double reach = j.predicate.by_distance ? j.predicate.limit : kTolerance;
    std::vector<Row> out;
    for (EntityId left : materialize(s)) {
      const Geometry& lg = d_.entity(left).geometry;
      std::vector<EntityId> matches;
      tree_.visit_bbox(lg.bbox().expanded(reach), [&](ItemId id) {
        const Entity& e = d_.entity(id);
        if (e.table != right->name) return;
        const bool ok = j.predicate.by_distance ? distance(lg, e.geometry) < j.predicate.limit
                                                : intersects(lg, e.geometry);
        if (ok) matches.push_back(id);
      });
      std::sort(matches.begin(), matches.end());
      for (EntityId m : matches) out.push_back({left, m});
      cap(out.size());
    }
    s.table = nullptr;
    s.ids.clear();
    s.pairs = std::move(out);
    s.joined = true;
  }

  const CheckedPlan& plan_;
  const Dataset& d_;
  const StrTree& tree_;
  const ExecOptions& opts_;
};

}  // namespace

CheckedPlan typecheck(const Query& q, const Dataset& d) {
  CheckedPlan plan;
  plan.query = q;
  Checker(d, plan).pipeline(q.pipeline, false);
  return plan;
}

ResultSet execute(const CheckedPlan& plan, const Dataset& d, const StrTree& tree,
                  const ExecOptions& opts) {
  Executor ex(plan, d, tree, opts);
  Stream s = ex.run(plan.query.pipeline);
  ResultSet rs;
  if (s.joined) {
    rs.rows = std::move(s.pairs);
  } else {
    for (EntityId id : ex.materialize(s)) rs.rows.push_back({id});
  }
  if (rs.rows.size() > opts.row_cap) throw ExecutionError("result cap exceeded");
  if (plan.query.terminal == Terminal::kCount) {
    rs.is_count = true;
    rs.count = rs.rows.size();
    rs.rows.clear();
  }
  return rs;
}

Verdict validate_query(std::string_view exe, const Dataset& d, const StrTree& tree,
                       const ExecOptions& opts) {
  Verdict v;
  Query q;
  try {
    q = parse_query(exe);
  } catch (const QueryError& e) {
    v.stage = "parse";
    v.reason = e.what();
    return v;
  }
  CheckedPlan plan;
  try {
    plan = typecheck(q, d);
  } catch (const TypeCheckError& e) {
    v.stage = "typecheck";
    v.reason = e.what();
    return v;
  }
  ResultSet rs;
  try {
    rs = execute(plan, d, tree, opts);
  } catch (const std::exception& e) {
    v.stage = "execute";
    v.reason = e.what();
    return v;
  }
  v.rows_returned = rs.is_count ? 1 : rs.rows.size();
  if (!rs.is_count && rs.rows.empty()) {
    v.stage = "result";
    v.reason = "empty result";
    return v;
  }
  v.valid = true;
  return v;
}

Verdict validate_pair(const QueryPair& p, const Dataset& d, const StrTree& tree,
                      const ExecOptions& opts) {
  return validate_query(p.exe, d, tree, opts);
}

std::vector<Verdict> validate_batch(const std::vector<std::string>& exes, const Dataset& d,
                                    const StrTree& tree, std::size_t jobs, const ExecOptions& opts) {
  std::vector<Verdict> out(exes.size());
  detail::parallel_chunks(exes.size(), jobs, [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t i = begin; i < end; ++i) out[i] = validate_query(exes[i], d, tree, opts);
  });
  return out;
}

}  // namespace sscc::query

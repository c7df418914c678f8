#include "essograph/learner.hpp"

#include "essograph/errors.hpp"

#include <algorithm>
#include <functional>
#include <json.hpp>

namespace essograph {

namespace {

bool contains(const std::vector<int>& v, int x) {
    return std::find(v.begin(), v.end(), x) != v.end();
}

void erase_value(std::vector<int>& v, int x) {
    v.erase(std::remove(v.begin(), v.end(), x), v.end());
}

void insert_sorted(std::vector<int>& v, int x) {
    v.insert(std::upper_bound(v.begin(), v.end(), x), x);
}

std::vector<int> intersect_sorted(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

// Subsets of items in increasing size, then lexicographic member order,
// including the empty set; the visitor returns true to stop.
bool subsets_increasing(const std::vector<int>& items, int max_size,
                        const std::function<bool(const std::vector<int>&)>& fn) {
    std::vector<int> pick;
    std::function<bool(std::size_t, int)> rec = [&](std::size_t start, int k) -> bool {
        if (static_cast<int>(pick.size()) == k) return fn(pick);
        for (std::size_t i = start; i < items.size(); ++i) {
            pick.push_back(items[i]);
            if (rec(i + 1, k)) return true;
            pick.pop_back();
        }
        return false;
    };
    for (int k = 0; k <= std::min<int>(max_size, static_cast<int>(items.size())); ++k)
        if (rec(0, k)) return true;
    return false;
}

Vee make_vee(int outer1, int center, int outer2) {
    return {std::min(outer1, outer2), center, std::max(outer1, outer2)};
}

} // namespace

void m3pc_stage1(CiSource& src, int d, NeighborSets& Z, SepsetStore& sepsets) {
    Z.assign(d, {});
    for (int j = 0; j < d; ++j) {
        for (int i = 0; i < d; ++i) {
            if (i == j) continue;
            std::vector<int> S = Z[j];
            if (src.determine(i, j, S) == 1)
                insert_sorted(Z[j], i);
            else
                sepsets.record(i, j, S);
        }
    }
}

void m3pc_stage2(int d, NeighborSets& Z, const SepsetStore& sepsets, std::set<Vee>& I) {
    for (int j = 0; j < d; ++j) {
        const std::vector<int> Zj0 = Z[j];  // scan set frozen on entry for j
        for (int k = 0; k < d; ++k) {
            if (j == k) continue;
            if (!contains(Z[k], j)) {
                std::vector<int> S = sepsets.get_or_empty(j, k);
                for (int y : intersect_sorted(Zj0, Z[k]))
                    if (!contains(S, y)) I.insert(make_vee(j, y, k));
                if (contains(Z[j], k)) erase_value(Z[j], k);
            }
        }
    }
}

void m3pc_stage3(CiSource& src, int d, NeighborSets& Z, SepsetStore& sepsets,
                 std::set<Vee>& I) {
    for (int j = 0; j < d; ++j) {
        const std::vector<int> snapshot = Z[j];
        for (int i : snapshot) {
            std::vector<int> rest;
            for (int v : Z[j])
                if (v != i) rest.push_back(v);
            std::vector<int> found;
            bool removed = subsets_increasing(rest, src.max_cond(),
                                              [&](const std::vector<int>& S) {
                                                  if (src.determine(i, j, S) == 0) {
                                                      found = S;
                                                      return true;
                                                  }
                                                  return false;
                                              });
            if (removed) {
                erase_value(Z[j], i);
                sepsets.overwrite(i, j, found);
                for (int p : intersect_sorted(Z[j], Z[i]))
                    if (!contains(found, p)) I.insert(make_vee(j, p, i));
            }
        }
    }
}

void m3pc_stage4(int d, NeighborSets& Z) {
    for (int j = 0; j < d; ++j) {
        const std::vector<int> snapshot = Z[j];
        for (int k : snapshot)
            if (!contains(Z[k], j)) erase_value(Z[j], k);
    }
}

void m3pc_stage5(CiSource& src, int d, const NeighborSets& Z, const SepsetStore& sepsets,
                 std::set<Vee>& I) {
    // Part 1: keep a triple only while its centre is still adjacent to both
    // outer nodes.
    for (auto it = I.begin(); it != I.end();) {
        auto [a, y, c] = *it;
        if (contains(Z[a], y) && contains(Z[c], y))
            ++it;
        else
            it = I.erase(it);
    }
    // Part 2 and 3: canonical outer pairs ascending; contradictory partners
    // are triples centred at the second outer node sharing this centre.  One
    // extra test decides which of the two triples survives.
    for (int i = 0; i < d; ++i) {
        for (int k = i + 1; k < d; ++k) {
            for (int j = 0; j < d; ++j) {
                if (j == i || j == k) continue;
                Vee t{i, j, k};
                if (!I.count(t)) continue;
                for (int p = 0; p < d; ++p) {
                    if (p == j || p == k) continue;
                    Vee partner = make_vee(j, k, p);
                    if (!I.count(partner)) continue;
                    std::vector<int> S = sepsets.get_or_empty(j, p);
                    if (!contains(S, k)) S.push_back(k);
                    if (src.determine(j, p, S) == 0) {
                        I.erase(partner);
                    } else {
                        I.erase(t);
                        break;
                    }
                }
            }
        }
    }
}

MixedGraph m3pc_stage6(int d, const NeighborSets& Z, const std::set<Vee>& I) {
    MixedGraph g(d);
    for (auto [a, y, c] : I) {
        g.add_directed(a, y);
        g.add_directed(c, y);
    }
    for (int j = 0; j < d; ++j)
        for (int k : Z[j])
            if (j < k && contains(Z[k], j))
                if (!g.has_directed(j, k) && !g.has_directed(k, j)) g.add_undirected(j, k);
    return g;
}

M3pcResult run_m3pc(CiSource& src, int d) {
    if (d <= 0) throw ArgumentError("run_m3pc: need at least one variable");
    M3pcResult r;
    r.d = d;
    NeighborSets Z;
    std::set<Vee> I;

    m3pc_stage1(src, d, Z, r.sepsets);
    r.z_stage1 = Z;
    m3pc_stage2(d, Z, r.sepsets, I);
    r.z_stage2 = Z;
    r.i_stage2.assign(I.begin(), I.end());
    m3pc_stage3(src, d, Z, r.sepsets, I);
    r.z_stage3 = Z;
    m3pc_stage4(d, Z);
    r.z_stage4 = Z;
    m3pc_stage5(src, d, Z, r.sepsets, I);
    r.i_final.assign(I.begin(), I.end());
    r.pre_closure = m3pc_stage6(d, Z, I);

    MixedGraph closed = close(r.pre_closure, r.i_final);
    ValidationReport rep = validate_essential(closed);
    std::vector<Vee> closed_imms = immoralities(closed);
    bool emergent = false;
    for (const Vee& t : closed_imms)
        if (!I.count(t)) {
            emergent = true;
            break;
        }
    if (!rep.ok() || emergent) {
        r.repaired = true;
        r.graph = repair(closed, r.i_final, r.repair_log);
    } else {
        r.graph = closed;
    }
    return r;
}

NeighborSets mmpc_skeleton(CiSource& src, int d) {
    NeighborSets Z(d);
    for (int j = 0; j < d; ++j) {
        for (int i = 0; i < d; ++i) {
            if (i == j) continue;
            if (src.determine(i, j, Z[j]) == 1) insert_sorted(Z[j], i);
        }
    }
    auto symmetrize = [&] {
        for (int j = 0; j < d; ++j) {
            const std::vector<int> snapshot = Z[j];
            for (int k : snapshot)
                if (!contains(Z[k], j)) erase_value(Z[j], k);
        }
    };
    symmetrize();
    for (int j = 0; j < d; ++j) {
        const std::vector<int> snapshot = Z[j];
        for (int i : snapshot) {
            std::vector<int> rest;
            for (int v : Z[j])
                if (v != i) rest.push_back(v);
            bool removed = subsets_increasing(rest, src.max_cond(),
                                              [&](const std::vector<int>& S) {
                                                  return src.determine(i, j, S) == 0;
                                              });
            if (removed) erase_value(Z[j], i);
        }
    }
    symmetrize();
    return Z;
}

std::string report_json(const M3pcResult& r, const std::vector<std::string>& names,
                        const CallMeter& meter) {
    using json = nlohmann::ordered_json;
    auto name_of = [&](int v) { return names.at(static_cast<std::size_t>(v)); };
    auto zsets = [&](const NeighborSets& Z) {
        json out = json::object();
        for (int j = 0; j < r.d; ++j) {
            json lst = json::array();
            for (int v : Z[j]) lst.push_back(name_of(v));
            out[name_of(j)] = lst;
        }
        return out;
    };
    auto triples = [&](const std::vector<Vee>& I) {
        json out = json::array();
        for (auto [a, y, c] : I) out.push_back({name_of(a), name_of(y), name_of(c)});
        return out;
    };

    json j;
    j["stages"] = json::object();
    j["stages"]["stage1"] = zsets(r.z_stage1);
    j["stages"]["stage2"] = zsets(r.z_stage2);
    j["stages"]["stage2_candidates"] = triples(r.i_stage2);
    j["stages"]["stage3"] = zsets(r.z_stage3);
    j["stages"]["stage4"] = zsets(r.z_stage4);
    j["immoralities"] = triples(r.i_final);
    j["sepsets"] = json::object();
    for (const auto& [pair, S] : r.sepsets.all()) {
        json lst = json::array();
        for (int v : S) lst.push_back(name_of(v));
        j["sepsets"][name_of(pair.first) + "," + name_of(pair.second)] = lst;
    }
    j["meter"] = {{"data_calls", meter.data_calls.load()},
                  {"test_calls", meter.test_calls.load()}};
    j["repaired"] = r.repaired;
    j["repair_log"] = json::array();
    for (const auto& e : r.repair_log.entries)
        j["repair_log"].push_back({{"action", repair_action_name(e.action)},
                                   {"u", name_of(e.u)},
                                   {"v", name_of(e.v)}});
    return j.dump(2) + "\n";
}

} // namespace essograph

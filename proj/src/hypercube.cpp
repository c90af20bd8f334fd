#include "coxred/hypercube.hpp"

#include "coxred/errors.hpp"
#include "coxred/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace coxred::hypercube {

namespace {

std::size_t checked_power(int side, int dims) {
    std::size_t cells = 1;
    for (int i = 0; i < dims; ++i) {
        if (cells > (std::size_t{1} << 40) / static_cast<std::size_t>(side))
            throw ConfigError("arrangement too large");
        cells *= static_cast<std::size_t>(side);
    }
    return cells;
}

}  // namespace

Shape choose_shape(std::size_t p_effective, int dims) {
    if (dims < 1) throw DomainError("arrangement needs at least one dimension");
    int side = 2;
    while (checked_power(side, dims) < p_effective) ++side;
    return {dims, side};
}

Arrangement::Arrangement(int dims, int side, std::uint64_t seed, std::vector<int> cells)
    : dims_(dims), side_(side), seed_(seed), cells_(std::move(cells)) {
    if (dims_ < 1 || side_ < 1) throw DomainError("arrangement needs dims >= 1 and side >= 1");
    if (cells_.size() != checked_power(side_, dims_)) throw DomainError("cell list does not match side^dims");
    for (std::size_t c = 0; c < cells_.size(); ++c)
        if (cells_[c] != kEmpty) placement_.emplace_back(cells_[c], static_cast<int>(c));
    std::sort(placement_.begin(), placement_.end());
    for (std::size_t i = 1; i < placement_.size(); ++i)
        if (placement_[i].first == placement_[i - 1].first) throw DomainError("index placed in two cells");
}

IndexSet Arrangement::indices() const {
    IndexSet out;
    out.reserve(placement_.size());
    for (const auto& [index, cell] : placement_) out.push_back(index);
    return out;
}

int Arrangement::cell_of(int index) const {
    const auto it = std::lower_bound(placement_.begin(), placement_.end(), std::make_pair(index, -1));
    if (it == placement_.end() || it->first != index) return -1;
    return it->second;
}

std::vector<int> Arrangement::coordinates(std::size_t cell) const {
    std::vector<int> coord(static_cast<std::size_t>(dims_));
    for (int axis = 0; axis < dims_; ++axis) {
        coord[static_cast<std::size_t>(axis)] = static_cast<int>(cell % static_cast<std::size_t>(side_));
        cell /= static_cast<std::size_t>(side_);
    }
    return coord;
}

namespace {

// Axis along which two cells differ, if they differ in exactly one coordinate.
int shared_axis(const std::vector<int>& a, const std::vector<int>& b) {
    int axis = -1;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) {
            if (axis >= 0) return -1;
            axis = static_cast<int>(i);
        }
    }
    return axis;
}

}  // namespace

int Arrangement::companions(int index, const IndexSet& marked) const {
    const int cell = cell_of(index);
    if (cell < 0) return 0;
    const auto here = coordinates(static_cast<std::size_t>(cell));
    int count = 0;
    for (int other : marked) {
        if (other == index) continue;
        const int oc = cell_of(other);
        if (oc >= 0 && shared_axis(here, coordinates(static_cast<std::size_t>(oc))) >= 0) ++count;
    }
    return count;
}

int Arrangement::accompanied_fibres(int index, const IndexSet& marked) const {
    const int cell = cell_of(index);
    if (cell < 0) return 0;
    const auto here = coordinates(static_cast<std::size_t>(cell));
    std::vector<bool> hit(static_cast<std::size_t>(dims_), false);
    for (int other : marked) {
        if (other == index) continue;
        const int oc = cell_of(other);
        if (oc < 0) continue;
        const int axis = shared_axis(here, coordinates(static_cast<std::size_t>(oc)));
        if (axis >= 0) hit[static_cast<std::size_t>(axis)] = true;
    }
    return static_cast<int>(std::count(hit.begin(), hit.end(), true));
}

bool Arrangement::operator==(const Arrangement& other) const {
    return dims_ == other.dims_ && side_ == other.side_ && seed_ == other.seed_ && cells_ == other.cells_;
}

Arrangement randomise(const IndexSet& indices, int dims, int side, std::uint64_t seed) {
    const std::size_t capacity = checked_power(side, dims);
    if (indices.size() > capacity) throw Overflow(indices.size(), capacity);
    std::vector<int> order(capacity);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(order);
    std::vector<int> cells(capacity, Arrangement::kEmpty);
    const IndexSet sorted = make_index_set(indices);
    if (sorted.size() != indices.size()) throw DomainError("duplicate indices in arrangement");
    for (std::size_t i = 0; i < sorted.size(); ++i) cells[static_cast<std::size_t>(order[i])] = sorted[i];
    return Arrangement(dims, side, seed, std::move(cells));
}

std::vector<Fibre> fibres(const Arrangement& a) {
    const int d = a.dims();
    const auto k = static_cast<std::size_t>(a.side());
    std::vector<std::size_t> stride(static_cast<std::size_t>(d), 1);
    for (int i = 1; i < d; ++i) stride[static_cast<std::size_t>(i)] = stride[static_cast<std::size_t>(i - 1)] * k;

    const std::size_t anchors = a.cell_count() / k;
    std::vector<Fibre> out;
    for (int axis = 0; axis < d; ++axis) {
        for (std::size_t anchor_id = 0; anchor_id < anchors; ++anchor_id) {
            Fibre f;
            f.axis = axis;
            // Decode the anchor over the remaining axes, lowest axis fastest.
            std::size_t base = 0;
            std::size_t rest = anchor_id;
            for (int other = 0; other < d; ++other) {
                if (other == axis) continue;
                const auto c = rest % k;
                rest /= k;
                f.anchor.push_back(static_cast<int>(c));
                base += c * stride[static_cast<std::size_t>(other)];
            }
            for (std::size_t step = 0; step < k; ++step) {
                const int v = a.at(base + step * stride[static_cast<std::size_t>(axis)]);
                if (v != Arrangement::kEmpty) f.members.push_back(v);
            }
            if (!f.members.empty()) out.push_back(std::move(f));
        }
    }
    return out;
}

IndexSet PairingGroups::representatives() const {
    IndexSet out;
    for (const auto& g : groups) out.push_back(g.front());
    return make_index_set(std::move(out));
}

std::size_t PairingGroups::multi_member_groups() const {
    return static_cast<std::size_t>(
        std::count_if(groups.begin(), groups.end(), [](const IndexSet& g) { return g.size() > 1; }));
}

PairingGroups pair_collinear(const Matrix& x, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0)) throw DomainError("pairing threshold must lie in (0, 1)");
    const Eigen::Index p = x.cols();
    Matrix unit = x;
    std::vector<bool> usable(static_cast<std::size_t>(p), false);
    for (Eigen::Index j = 0; j < p; ++j) {
        const double nrm = x.col(j).norm();
        if (nrm > 1e-300) {
            unit.col(j) /= nrm;
            usable[static_cast<std::size_t>(j)] = true;
        }
    }
    const Matrix gram = unit.transpose() * unit;

    std::vector<int> parent(static_cast<std::size_t>(p));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int i) {
        while (parent[static_cast<std::size_t>(i)] != i) {
            parent[static_cast<std::size_t>(i)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])];
            i = parent[static_cast<std::size_t>(i)];
        }
        return i;
    };
    for (Eigen::Index i = 0; i < p; ++i) {
        if (!usable[static_cast<std::size_t>(i)]) continue;
        for (Eigen::Index j = i + 1; j < p; ++j) {
            if (!usable[static_cast<std::size_t>(j)]) continue;
            if (std::fabs(gram(i, j)) >= threshold) {
                const int ri = find(static_cast<int>(i));
                const int rj = find(static_cast<int>(j));
                if (ri != rj) parent[static_cast<std::size_t>(std::max(ri, rj))] = std::min(ri, rj);
            }
        }
    }

    PairingGroups out;
    out.threshold = threshold;
    out.representative.resize(static_cast<std::size_t>(p));
    std::vector<int> slot(static_cast<std::size_t>(p), -1);
    for (int j = 0; j < static_cast<int>(p); ++j) {
        const int root = find(j);  // roots are the lowest index of their group
        out.representative[static_cast<std::size_t>(j)] = root;
        if (slot[static_cast<std::size_t>(root)] < 0) {
            slot[static_cast<std::size_t>(root)] = static_cast<int>(out.groups.size());
            out.groups.emplace_back();
        }
        out.groups[static_cast<std::size_t>(slot[static_cast<std::size_t>(root)])].push_back(j);
    }
    return out;
}

IndexSet unpair(const IndexSet& retained, const PairingGroups& groups) {
    std::vector<int> out;
    for (int r : retained) {
        const bool known = r >= 0 && static_cast<std::size_t>(r) < groups.representative.size();
        if (known && groups.representative[static_cast<std::size_t>(r)] == r) {
            for (const auto& g : groups.groups) {
                if (g.front() == r) {
                    out.insert(out.end(), g.begin(), g.end());
                    break;
                }
            }
        } else {
            out.push_back(r);
        }
    }
    return make_index_set(std::move(out));
}

std::string arrangement_record(const Arrangement& a) {
    nlohmann::ordered_json j;
    j["dims"] = a.dims();
    j["side"] = a.side();
    j["seed"] = a.seed();
    auto cells = nlohmann::ordered_json::array();
    for (std::size_t c = 0; c < a.cell_count(); ++c)
        if (a.at(c) != Arrangement::kEmpty) cells.push_back({c, a.at(c)});
    j["cells"] = std::move(cells);
    return j.dump();
}

Arrangement arrangement_from_record(const std::string& record) {
    const auto j = nlohmann::json::parse(record);
    const int dims = j.at("dims").get<int>();
    const int side = j.at("side").get<int>();
    std::vector<int> cells(checked_power(side, dims), Arrangement::kEmpty);
    for (const auto& entry : j.at("cells")) cells.at(entry.at(0).get<std::size_t>()) = entry.at(1).get<int>();
    return Arrangement(dims, side, j.at("seed").get<std::uint64_t>(), std::move(cells));
}

}  // namespace coxred::hypercube

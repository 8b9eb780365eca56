#pragma once

// Expert families, the cross-entropy-minimizing learner (exact mixture and
// empirical fit) and tempered policies over a finite input/output space.

#include <transcend/dist.hpp>
#include <transcend/error.hpp>
#include <transcend/random.hpp>

#include <json.hpp>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace transcend {

/// r(x, y) for a finite instance. An optional legality mask restricts which
/// outputs exist at each input (used by the game testbeds, where |Y_x| varies);
/// illegal entries carry no reward and never receive probability mass.
class RewardTable {
public:
    RewardTable() = default;

    RewardTable(std::size_t num_inputs, std::size_t num_outputs, std::vector<double> rewards,
                std::vector<std::uint8_t> legal = {})
        : inputs_(num_inputs)
        , outputs_(num_outputs)
        , r_(std::move(rewards))
        , legal_(std::move(legal))
    {
        if (num_inputs == 0 || num_outputs == 0)
            throw Error(Errc::InvalidInstance, "reward table needs >= 1 input and output");
        if (r_.size() != inputs_ * outputs_)
            throw Error(Errc::DimensionMismatch, "reward matrix size != inputs x outputs");
        if (!legal_.empty() && legal_.size() != r_.size())
            throw Error(Errc::DimensionMismatch, "legality mask size != inputs x outputs");
        for (std::size_t x = 0; x < inputs_; ++x)
            if (num_legal(x) == 0)
                throw Error(Errc::InvalidInstance, "input " + std::to_string(x) + " has no legal output");
    }

    std::size_t num_inputs() const noexcept { return inputs_; }
    std::size_t num_outputs() const noexcept { return outputs_; }
    double operator()(std::size_t x, std::size_t y) const { return r_[x * outputs_ + y]; }
    std::span<const double> row(std::size_t x) const { return {r_.data() + x * outputs_, outputs_}; }

    bool masked() const noexcept { return !legal_.empty(); }
    bool is_legal(std::size_t x, std::size_t y) const { return legal_.empty() || legal_[x * outputs_ + y] != 0; }
    SupportMask support(std::size_t x) const
    {
        if (legal_.empty())
            return {};
        return {legal_.data() + x * outputs_, outputs_};
    }

    std::size_t num_legal(std::size_t x) const
    {
        if (legal_.empty())
            return outputs_;
        return static_cast<std::size_t>(std::count_if(legal_.begin() + static_cast<std::ptrdiff_t>(x * outputs_),
                                                      legal_.begin() + static_cast<std::ptrdiff_t>((x + 1) * outputs_),
                                                      [](std::uint8_t v) { return v != 0; }));
    }

    /// True when every legal output of row x carries the same reward.
    bool row_is_constant(std::size_t x) const
    {
        std::optional<double> first;
        for (std::size_t y = 0; y < outputs_; ++y) {
            if (!is_legal(x, y))
                continue;
            if (!first)
                first = (*this)(x, y);
            else if ((*this)(x, y) != *first)
                return false;
        }
        return true;
    }

    double row_max(std::size_t x) const
    {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t y = 0; y < outputs_; ++y)
            if (is_legal(x, y))
                best = std::max(best, (*this)(x, y));
        return best;
    }

    /// Mean reward over the legal outputs of row x.
    double row_mean(std::size_t x) const
    {
        double s = 0.0;
        for (std::size_t y = 0; y < outputs_; ++y)
            if (is_legal(x, y))
                s += (*this)(x, y);
        return s / static_cast<double>(num_legal(x));
    }

private:
    std::size_t inputs_ = 0;
    std::size_t outputs_ = 0;
    std::vector<double> r_;
    std::vector<std::uint8_t> legal_;
};

/// Training distribution p, test distribution p_test and the reward table.
/// p must have full support and every reward row must be non-constant.
class Instance {
public:
    Instance(RewardTable reward, Dist p, Dist p_test) : reward_(std::move(reward)), p_(std::move(p)), p_test_(std::move(p_test))
    {
        if (p_.size() != reward_.num_inputs() || p_test_.size() != reward_.num_inputs())
            throw Error(Errc::DimensionMismatch, "input distributions must cover every input");
        for (std::size_t x = 0; x < p_.size(); ++x) {
            if (!(p_[x] > 0.0))
                throw Error(Errc::InvalidInstance, "training distribution lacks full support");
            if (reward_.row_is_constant(x))
                throw Error(Errc::InvalidInstance, "reward row " + std::to_string(x) + " is constant");
        }
    }

    const RewardTable& reward() const noexcept { return reward_; }
    const Dist& p() const noexcept { return p_; }
    const Dist& p_test() const noexcept { return p_test_; }
    std::size_t num_inputs() const noexcept { return reward_.num_inputs(); }
    std::size_t num_outputs() const noexcept { return reward_.num_outputs(); }

    Instance with_p_test(Dist p_test) const { return Instance(reward_, p_, std::move(p_test)); }

private:
    RewardTable reward_;
    Dist p_;
    Dist p_test_;
};

/// A conditional distribution: one Dist over outputs per input id.
class Policy {
public:
    Policy(std::string label, std::vector<Dist> rows) : label_(std::move(label)), rows_(std::move(rows))
    {
        if (rows_.empty())
            throw Error(Errc::InvalidDist, "policy needs at least one input");
        for (const Dist& d : rows_)
            if (d.size() != rows_.front().size())
                throw Error(Errc::DimensionMismatch, "policy rows differ in dimension");
    }

    const std::string& label() const noexcept { return label_; }
    std::size_t num_inputs() const noexcept { return rows_.size(); }
    std::size_t num_outputs() const noexcept { return rows_.front().size(); }
    const Dist& operator()(std::size_t x) const { return rows_[x]; }
    std::span<const Dist> rows() const noexcept { return rows_; }

    Policy relabeled(std::string label) const { return Policy(std::move(label), rows_); }

    friend bool operator==(const Policy&, const Policy&) = default;

private:
    std::string label_;
    std::vector<Dist> rows_;
};

inline double sup_distance(const Policy& a, const Policy& b)
{
    if (a.num_inputs() != b.num_inputs() || a.num_outputs() != b.num_outputs())
        throw Error(Errc::DimensionMismatch, "policies differ in shape");
    double d = 0.0;
    for (std::size_t x = 0; x < a.num_inputs(); ++x)
        d = std::max(d, sup_distance(a(x), b(x)));
    return d;
}

namespace detail {

inline Dist uniform_over_legal(const RewardTable& table, std::size_t x)
{
    std::vector<double> w(table.num_outputs(), 0.0);
    for (std::size_t y = 0; y < w.size(); ++y)
        if (table.is_legal(x, y))
            w[y] = 1.0;
    return normalize(w);
}

inline Dist optimal_row(const RewardTable& table, std::size_t x)
{
    const double best = table.row_max(x);
    std::vector<double> w(table.num_outputs(), 0.0);
    for (std::size_t y = 0; y < w.size(); ++y)
        if (table.is_legal(x, y) && table(x, y) == best)
            w[y] = 1.0;
    return normalize(w);
}

} // namespace detail

/// f*: uniform over the reward-maximizing tie set Y*_x at every input.
inline Policy optimal_expert(const RewardTable& table)
{
    std::vector<Dist> rows;
    rows.reserve(table.num_inputs());
    for (std::size_t x = 0; x < table.num_inputs(); ++x)
        rows.push_back(detail::optimal_row(table, x));
    return Policy("optimal", std::move(rows));
}

inline Policy optimal_expert(const Instance& inst) { return optimal_expert(inst.reward()); }

/// Uniform over the legal outputs at every input.
inline Policy uniform_policy(const RewardTable& table)
{
    std::vector<Dist> rows;
    rows.reserve(table.num_inputs());
    for (std::size_t x = 0; x < table.num_inputs(); ++x)
        rows.push_back(detail::uniform_over_legal(table, x));
    return Policy("uniform", std::move(rows));
}

/// f_rho = rho / |Y_x| + (1 - rho) f*, with |Y_x| the number of legal outputs.
inline Policy noisy_expert(const RewardTable& table, double rho)
{
    if (!(rho > 0.0 && rho < 1.0))
        throw Error(Errc::RhoOutOfRange, "rho must lie in (0, 1)");
    std::vector<Dist> rows;
    rows.reserve(table.num_inputs());
    for (std::size_t x = 0; x < table.num_inputs(); ++x) {
        const Dist star = detail::optimal_row(table, x);
        const double noise = rho / static_cast<double>(table.num_legal(x));
        std::vector<double> p(table.num_outputs(), 0.0);
        for (std::size_t y = 0; y < p.size(); ++y)
            if (table.is_legal(x, y))
                p[y] = noise + (1.0 - rho) * star[y];
        rows.push_back(detail_make_dist(std::move(p)));
    }
    return Policy("noisy(rho=" + std::to_string(rho) + ")", std::move(rows));
}

inline Policy noisy_expert(const Instance& inst, double rho) { return noisy_expert(inst.reward(), rho); }

/// Input partition X = X_1 u ... u X_k, each cell a list of input ids.
using Partition = std::vector<std::vector<std::size_t>>;

/// Cell index of every input; throws BadPartition on overlap, gap or empty cell.
inline std::vector<std::size_t> partition_cells(const Partition& partition, std::size_t num_inputs)
{
    if (partition.size() < 2)
        throw Error(Errc::BadPartition, "need at least two cells");
    std::vector<std::size_t> cell(num_inputs, partition.size());
    for (std::size_t i = 0; i < partition.size(); ++i) {
        if (partition[i].empty())
            throw Error(Errc::BadPartition, "cell " + std::to_string(i) + " is empty");
        for (std::size_t x : partition[i]) {
            if (x >= num_inputs)
                throw Error(Errc::BadPartition, "input id out of range");
            if (cell[x] != partition.size())
                throw Error(Errc::BadPartition, "input " + std::to_string(x) + " appears twice");
            cell[x] = i;
        }
    }
    for (std::size_t x = 0; x < num_inputs; ++x)
        if (cell[x] == partition.size())
            throw Error(Errc::BadPartition, "input " + std::to_string(x) + " is not covered");
    return cell;
}

/// Expert i plays f* on X_i and uniformly elsewhere.
inline std::vector<Policy> partition_experts(const RewardTable& table, const Partition& partition)
{
    const auto cell = partition_cells(partition, table.num_inputs());
    std::vector<Policy> experts;
    for (std::size_t i = 0; i < partition.size(); ++i) {
        std::vector<Dist> rows;
        for (std::size_t x = 0; x < table.num_inputs(); ++x)
            rows.push_back(cell[x] == i ? detail::optimal_row(table, x) : detail::uniform_over_legal(table, x));
        experts.emplace_back("partition_expert_" + std::to_string(i), std::move(rows));
    }
    return experts;
}

inline std::vector<Policy> partition_experts(const Instance& inst, const Partition& partition)
{
    return partition_experts(inst.reward(), partition);
}

/// Per-input mixture; the exact population cross-entropy minimizer. Non-uniform
/// weights are accepted but mark the label, since they leave the uniform-expert setting.
inline Policy mixture_policy(std::span<const Policy> experts, std::span<const double> weights = {})
{
    if (experts.empty())
        throw Error(Errc::InvalidDist, "mixture of zero experts");
    const std::size_t ni = experts.front().num_inputs();
    for (const Policy& e : experts)
        if (e.num_inputs() != ni || e.num_outputs() != experts.front().num_outputs())
            throw Error(Errc::DimensionMismatch, "experts differ in shape");
    std::vector<Dist> rows;
    rows.reserve(ni);
    std::vector<Dist> column;
    for (std::size_t x = 0; x < ni; ++x) {
        column.clear();
        for (const Policy& e : experts)
            column.push_back(e(x));
        rows.push_back(mix(column, weights));
    }
    return Policy(weights.empty() ? "mixture" : "mixture(weighted)", std::move(rows));
}

struct LabeledSample {
    std::size_t input;
    std::size_t output;
};

/// Per-input relative frequencies with additive smoothing; unseen inputs get uniform.
inline Policy fit_empirical(std::span<const LabeledSample> samples, std::size_t num_inputs,
                            std::size_t num_outputs, double smoothing = 0.0)
{
    if (num_inputs == 0 || num_outputs == 0)
        throw Error(Errc::InvalidDist, "empty input or output space");
    if (!(smoothing >= 0.0))
        throw Error(Errc::NegativeWeight, "smoothing must be >= 0");
    std::vector<double> counts(num_inputs * num_outputs, 0.0);
    std::vector<std::size_t> seen(num_inputs, 0);
    for (const LabeledSample& s : samples) {
        if (s.input >= num_inputs || s.output >= num_outputs)
            throw Error(Errc::IndexOutOfRange, "sample (" + std::to_string(s.input) + ", " + std::to_string(s.output) + ") out of range");
        counts[s.input * num_outputs + s.output] += 1.0;
        ++seen[s.input];
    }
    std::vector<Dist> rows;
    rows.reserve(num_inputs);
    for (std::size_t x = 0; x < num_inputs; ++x) {
        if (seen[x] == 0) {
            rows.push_back(Dist::uniform(num_outputs));
            continue;
        }
        std::vector<double> w(counts.begin() + static_cast<std::ptrdiff_t>(x * num_outputs),
                              counts.begin() + static_cast<std::ptrdiff_t>((x + 1) * num_outputs));
        for (double& c : w)
            c += smoothing;
        rows.push_back(normalize(w));
    }
    return Policy("empirical", std::move(rows));
}

/// Labels n inputs x ~ p, each by an expert chosen uniformly at random.
inline std::vector<LabeledSample> sample_random_expert_labels(std::span<const Policy> experts, const Dist& p,
                                                              std::size_t n, Rng& rng)
{
    std::vector<LabeledSample> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t x = rng.categorical(p.probs());
        const Policy& e = experts[rng.below(experts.size())];
        out.push_back({x, rng.categorical(e(x).probs())});
    }
    return out;
}

inline std::string temperature_label(Temperature tau)
{
    if (tau.is_zero())
        return "max";
    std::ostringstream os;
    os << tau.value();
    return os.str();
}

/// Applies the temperature transform row by row; ZERO gives the argmax policy.
inline Policy temper(const Policy& policy, Temperature tau, TemperScheme scheme)
{
    std::vector<Dist> rows;
    rows.reserve(policy.num_inputs());
    for (const Dist& d : policy.rows())
        rows.push_back(temper(d, tau, scheme));
    return Policy(policy.label() + "@tau=" + temperature_label(tau), std::move(rows));
}

/// As above but restricted to the table's legal outputs at every input.
inline Policy temper(const Policy& policy, Temperature tau, TemperScheme scheme, const RewardTable& table)
{
    if (!table.masked())
        return temper(policy, tau, scheme);
    if (table.num_inputs() != policy.num_inputs() || table.num_outputs() != policy.num_outputs())
        throw Error(Errc::DimensionMismatch, "policy and reward table differ in shape");
    std::vector<Dist> rows;
    rows.reserve(policy.num_inputs());
    for (std::size_t x = 0; x < policy.num_inputs(); ++x)
        rows.push_back(temper(policy(x), tau, scheme, table.support(x)));
    return Policy(policy.label() + "@tau=" + temperature_label(tau), std::move(rows));
}

inline nlohmann::json to_json(const Policy& policy)
{
    nlohmann::json rows = nlohmann::json::array();
    for (const Dist& d : policy.rows())
        rows.push_back(std::vector<double>(d.begin(), d.end()));
    return {{"label", policy.label()},
            {"num_inputs", policy.num_inputs()},
            {"num_outputs", policy.num_outputs()},
            {"rows", std::move(rows)}};
}

inline Policy policy_from_json(const nlohmann::json& j)
{
    const auto ni = j.at("num_inputs").get<std::size_t>();
    const auto no = j.at("num_outputs").get<std::size_t>();
    const auto& rows_j = j.at("rows");
    if (rows_j.size() != ni)
        throw Error(Errc::DimensionMismatch, "rows length != num_inputs");
    std::vector<Dist> rows;
    for (const auto& r : rows_j) {
        auto p = r.get<std::vector<double>>();
        if (p.size() != no)
            throw Error(Errc::DimensionMismatch, "row length != num_outputs");
        rows.push_back(Dist::from_probs(std::move(p)));
    }
    return Policy(j.at("label").get<std::string>(), std::move(rows));
}

} // namespace transcend

#include "proxtrace/classify/tree.hpp"

#include "proxtrace/error.hpp"

#include "json.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace proxtrace::classify {

namespace {

using FeatureRow = std::array<double, FeatureVector::kFeatureCount>;

struct BestSplit {
    bool found = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    double gain = 0.0;
};

std::array<std::size_t, 2> count_labels(const TrainingSet& data,
                                        const std::vector<std::size_t>& idx) {
    std::array<std::size_t, 2> counts{0, 0};
    for (std::size_t i : idx)
        ++counts[data[i].label == ProximityLabel::close ? 0 : 1];
    return counts;
}

ProximityLabel majority(const std::array<std::size_t, 2>& counts) {
    // Ties go to close: in this domain a missed contact is the costly error.
    return counts[0] >= counts[1] ? ProximityLabel::close : ProximityLabel::far;
}

BestSplit find_best_split(const TrainingSet& data, const std::vector<FeatureRow>& rows,
                          const std::vector<std::size_t>& idx, const TreeParams& params) {
    BestSplit best;
    std::vector<std::pair<double, ProximityLabel>> values;
    values.reserve(idx.size());
    const auto total = count_labels(data, idx);

    for (std::size_t f = 0; f < FeatureVector::kFeatureCount; ++f) {
        values.clear();
        for (std::size_t i : idx) values.emplace_back(rows[i][f], data[i].label);
        std::sort(values.begin(), values.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });

        std::size_t left_close = 0;
        std::size_t left_far = 0;
        for (std::size_t i = 0; i + 1 < values.size(); ++i) {
            ++(values[i].second == ProximityLabel::close ? left_close : left_far);
            if (values[i].first == values[i + 1].first) continue;   // not a boundary
            const std::size_t nl = i + 1;
            const std::size_t nr = values.size() - nl;
            if (nl < params.min_leaf || nr < params.min_leaf) continue;
            const double gain =
                split_gain(left_close, left_far, total[0] - left_close, total[1] - left_far);
            if (gain <= 0.0 || gain < params.min_impurity_decrease) continue;
            if (gain > best.gain) {
                best.found = true;
                best.feature = f;
                best.threshold = (values[i].first + values[i + 1].first) / 2.0;
                best.gain = gain;
            }
        }
    }
    return best;
}

TreeNode build(const TrainingSet& data, const std::vector<FeatureRow>& rows,
               const std::vector<std::size_t>& idx, const TreeParams& params,
               std::size_t depth) {
    TreeNode node;
    node.class_counts = count_labels(data, idx);
    node.label = majority(node.class_counts);

    const bool pure = node.class_counts[0] == 0 || node.class_counts[1] == 0;
    if (pure || depth >= params.max_depth || idx.size() < 2 * params.min_leaf) return node;

    const BestSplit best = find_best_split(data, rows, idx, params);
    if (!best.found) return node;

    std::vector<std::size_t> left_idx;
    std::vector<std::size_t> right_idx;
    for (std::size_t i : idx)
        (rows[i][best.feature] <= best.threshold ? left_idx : right_idx).push_back(i);

    node.feature_index = best.feature;
    node.threshold = best.threshold;
    node.left = std::make_unique<TreeNode>(build(data, rows, left_idx, params, depth + 1));
    node.right = std::make_unique<TreeNode>(build(data, rows, right_idx, params, depth + 1));
    return node;
}

} // namespace

TrainingSet to_training_set(const std::vector<LabeledWindow>& windows) {
    TrainingSet out;
    out.reserve(windows.size());
    for (const auto& w : windows) out.push_back({w.features, w.label});
    return out;
}

double compute_gini(std::size_t close_count, std::size_t far_count) {
    if (close_count == 0 && far_count == 0)
        raise(errc::empty_node, "gini of an empty node is undefined");
    const double n = static_cast<double>(close_count + far_count);
    const double pc = static_cast<double>(close_count) / n;
    const double pf = static_cast<double>(far_count) / n;
    return 1.0 - (pc * pc + pf * pf);
}

double split_gain(std::size_t left_close, std::size_t left_far, std::size_t right_close,
                  std::size_t right_far) {
    const std::size_t nl = left_close + left_far;
    const std::size_t nr = right_close + right_far;
    const double n = static_cast<double>(nl + nr);
    const double parent = compute_gini(left_close + right_close, left_far + right_far);
    const double left = compute_gini(left_close, left_far);
    const double right = compute_gini(right_close, right_far);
    return parent - (static_cast<double>(nl) * left + static_cast<double>(nr) * right) / n;
}

TreeNode train_tree(const TrainingSet& train, const TreeParams& params) {
    if (train.empty()) raise(errc::empty_training_set, "cannot train on an empty set");
    if (params.max_depth < 1 || params.min_leaf < 1 || params.min_impurity_decrease < 0)
        raise(errc::config_invalid, "invalid tree params");

    std::vector<FeatureRow> rows;
    rows.reserve(train.size());
    for (const auto& p : train) rows.push_back(p.features.as_array());

    std::vector<std::size_t> idx(train.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    return build(train, rows, idx, params, 0);
}

ProximityLabel predict(const TreeNode& tree, const FeatureVector& f) {
    const auto row = f.as_array();
    const TreeNode* node = &tree;
    while (!node->is_leaf()) {
        if (node->feature_index >= row.size())
            raise(errc::feature_index_out_of_range,
                  "tree references feature " + std::to_string(node->feature_index));
        node = (row[node->feature_index] <= node->threshold) ? node->left.get()
                                                             : node->right.get();
    }
    return node->label;
}

namespace {

void write_node(std::ostringstream& out, const TreeNode& node) {
    if (node.is_leaf()) {
        out << R"({"label": ")" << ingest::to_string(node.label) << R"(", "counts": [)"
            << node.class_counts[0] << ", " << node.class_counts[1] << "]}";
        return;
    }
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", node.threshold);
    out << R"({"feature": )" << node.feature_index << R"(, "threshold": )" << buf
        << R"(, "left": )";
    write_node(out, *node.left);
    out << R"(, "right": )";
    write_node(out, *node.right);
    out << "}";
}

TreeNode read_node(const nlohmann::json& j) {
    TreeNode node;
    if (j.contains("label")) {
        const std::string label = j.at("label").get<std::string>();
        if (label == "close")
            node.label = ProximityLabel::close;
        else if (label == "far")
            node.label = ProximityLabel::far;
        else
            raise(errc::malformed_data, "tree leaf label '" + label + "'");
        const auto& counts = j.at("counts");
        node.class_counts = {counts.at(0).get<std::size_t>(), counts.at(1).get<std::size_t>()};
        return node;
    }
    node.feature_index = j.at("feature").get<std::size_t>();
    node.threshold = j.at("threshold").get<double>();
    node.left = std::make_unique<TreeNode>(read_node(j.at("left")));
    node.right = std::make_unique<TreeNode>(read_node(j.at("right")));
    // Reconstruct internal counts and majority labels from the leaves.
    node.class_counts = {node.left->class_counts[0] + node.right->class_counts[0],
                         node.left->class_counts[1] + node.right->class_counts[1]};
    node.label = node.class_counts[0] >= node.class_counts[1] ? ProximityLabel::close
                                                              : ProximityLabel::far;
    return node;
}

} // namespace

std::string tree_to_json(const TreeNode& tree) {
    std::ostringstream out;
    write_node(out, tree);
    out << "\n";
    return out.str();
}

TreeNode tree_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        raise(errc::malformed_data, std::string("tree document is not valid JSON: ") + e.what());
    }
    try {
        return read_node(j);
    } catch (const nlohmann::json::exception& e) {
        raise(errc::malformed_data, std::string("tree document has wrong shape: ") + e.what());
    }
}

bool trees_equal(const TreeNode& a, const TreeNode& b) {
    if (a.is_leaf() != b.is_leaf()) return false;
    if (a.is_leaf()) return a.label == b.label && a.class_counts == b.class_counts;
    return a.feature_index == b.feature_index && a.threshold == b.threshold &&
           trees_equal(*a.left, *b.left) && trees_equal(*a.right, *b.right);
}

} // namespace proxtrace::classify

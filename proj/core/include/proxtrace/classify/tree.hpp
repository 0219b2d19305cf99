#pragma once

#include "proxtrace/ingest/features.hpp"

#include <array>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace proxtrace::classify {

using ingest::FeatureVector;
using ingest::LabeledWindow;
using ingest::ProximityLabel;

struct TreeParams {
    std::size_t max_depth = 8;
    std::size_t min_leaf = 5;
    double min_impurity_decrease = 0.0;
};

/// Binary CART node. Leaf when both children are null; split nodes send
/// feature <= threshold to the left child.
struct TreeNode {
    std::unique_ptr<TreeNode> left;
    std::unique_ptr<TreeNode> right;
    std::size_t feature_index = 0;
    double threshold = 0.0;
    ProximityLabel label = ProximityLabel::far;
    std::array<std::size_t, 2> class_counts{0, 0};   // [close, far] reaching this node

    bool is_leaf() const { return !left; }
};

struct TrainingPoint {
    FeatureVector features;
    ProximityLabel label = ProximityLabel::far;
};
using TrainingSet = std::vector<TrainingPoint>;

TrainingSet to_training_set(const std::vector<LabeledWindow>& windows);

/// Gini impurity 1 - sum p_i^2 of a (close, far) count pair; in [0, 0.5].
/// Throws errc::empty_node when both counts are zero.
double compute_gini(std::size_t close_count, std::size_t far_count);

/// Impurity decrease of a candidate split, computed from the four child
/// counts. Shared numeric definition for trainer and any oracle that wants
/// bit-identical comparisons.
double split_gain(std::size_t left_close, std::size_t left_far, std::size_t right_close,
                  std::size_t right_far);

/// Greedy CART. At each node the (feature, threshold) pair maximizing the
/// Gini decrease is chosen over midpoints of consecutive distinct sorted
/// feature values; ties break to the lowest feature index, then the lowest
/// threshold. Recursion stops on max_depth, min_leaf, or when no split
/// decreases impurity by at least min_impurity_decrease (and strictly more
/// than zero). Deterministic: identical inputs give identical trees.
TreeNode train_tree(const TrainingSet& train, const TreeParams& params);

/// Root-to-leaf descent; left branch on feature <= threshold. Throws
/// errc::feature_index_out_of_range if the tree references a feature the
/// vector does not carry (possible only with foreign tree files).
ProximityLabel predict(const TreeNode& tree, const FeatureVector& f);

/// JSON document with nested `feature`/`threshold`/`left`/`right` split
/// nodes and `label`/`counts` leaves. Thresholds are printed with 17
/// significant digits, so serialize/parse round-trips are bit-exact.
std::string tree_to_json(const TreeNode& tree);
TreeNode tree_from_json(const std::string& text);

bool trees_equal(const TreeNode& a, const TreeNode& b);

} // namespace proxtrace::classify

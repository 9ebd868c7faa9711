#pragma once

#include "lrldl/types.hpp"

namespace lrldl {

/// Per column, adds labels in descending order of description degree (ties by
/// lowest index) until the running sum of selected degrees exceeds `threshold`.
MultiLabelMatrix threshold_degrade(const LabelDistributionMatrix& D, double threshold);

/// Per column, marks the k largest description degrees (ties by lowest index).
MultiLabelMatrix topk_degrade(const LabelDistributionMatrix& D, int k);

MultiLabelMatrix degrade(const LabelDistributionMatrix& D, const Degradation& method);

}  // namespace lrldl

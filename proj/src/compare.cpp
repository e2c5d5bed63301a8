#include "crosstab/compare.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "crosstab/errors.hpp"
#include "crosstab/random.hpp"
#include "crosstab/svg.hpp"

namespace crosstab {

Configuration Configuration::build(std::vector<std::string> labels,
                                   Matrix coords) {
  if (coords.rows() != static_cast<Index>(labels.size()))
    raise(errc::dimension_mismatch, "one coordinate row per label required");
  if (coords.rows() < 3)
    raise(errc::too_few_items, "configuration needs at least 3 points");
  if (coords.cols() < 1)
    raise(errc::invalid_domain, "configuration needs at least 1 dimension");
  if (!coords.allFinite())
    raise(errc::non_finite_input, "coordinates must be finite");
  std::unordered_set<std::string> seen;
  for (const auto& label : labels)
    if (!seen.insert(label).second)
      raise(errc::duplicate_label, "duplicate point label: " + label);

  Configuration config;
  config.labels_ = std::move(labels);
  config.coords_ = std::move(coords);
  return config;
}

namespace {

void check_same_labels(const Configuration& a, const Configuration& b) {
  if (a.labels() != b.labels())
    raise(errc::label_mismatch,
          "configurations must carry the same labels in the same order");
}

// Zero-pads both coordinate sets to a common width.
std::pair<Matrix, Matrix> common_width(const Configuration& a,
                                       const Configuration& b) {
  const Index k = std::max(a.dims(), b.dims());
  Matrix pa = Matrix::Zero(a.size(), k);
  Matrix pb = Matrix::Zero(b.size(), k);
  pa.leftCols(a.dims()) = a.coords();
  pb.leftCols(b.dims()) = b.coords();
  return {std::move(pa), std::move(pb)};
}

Matrix center_unit(const Matrix& coords, const char* which) {
  Matrix centered = coords.rowwise() - coords.colwise().mean();
  const double norm = centered.norm();
  if (norm == 0.0)
    raise(errc::degenerate_configuration,
          std::string("all points of configuration ") + which + " coincide");
  return centered / norm;
}

double trace_of_singular_values(const Matrix& m) {
  return svd(m).singular_values.sum();
}

}  // namespace

ProcrustesResult procrustes_fit(const Configuration& a,
                                const Configuration& b) {
  check_same_labels(a, b);
  auto [pa, pb] = common_width(a, b);

  const Vector mean_a = pa.colwise().mean().transpose();
  const Vector mean_b = pb.colwise().mean().transpose();
  const Matrix a0 = pa.rowwise() - mean_a.transpose();
  const Matrix b0 = pb.rowwise() - mean_b.transpose();
  const double norm_a = a0.norm();
  const double norm_b = b0.norm();
  if (norm_a == 0.0)
    raise(errc::degenerate_configuration, "all points of a coincide");
  if (norm_b == 0.0)
    raise(errc::degenerate_configuration, "all points of b coincide");

  const Matrix a1 = a0 / norm_a;
  const Matrix b1 = b0 / norm_b;

  const SvdResult cross = svd(b1.transpose() * a1);
  const double trace = cross.singular_values.sum();

  ProcrustesResult result;
  result.rotation = cross.left_vectors * cross.right_vectors.transpose();
  result.m2 = std::clamp(1.0 - trace * trace, 0.0, 1.0);
  result.scale = trace * norm_a / norm_b;
  result.translation =
      mean_a - result.scale * (result.rotation.transpose() * mean_b);
  return result;
}

double procrustes_test(const Configuration& a, const Configuration& b,
                       std::int64_t permutations, std::uint64_t seed) {
  if (permutations < 99)
    raise(errc::too_few_replicates, "need at least 99 permutations");
  const double observed = procrustes_fit(a, b).m2;

  auto [pa, pb] = common_width(a, b);
  const Matrix a1 = center_unit(pa, "a");
  const Matrix b1 = center_unit(pb, "b");
  const std::size_t n = static_cast<std::size_t>(a1.rows());
  const Index k = a1.cols();

  const std::int64_t hits = chunked_count(
      permutations, seed,
      [&](std::mt19937_64& rng, std::int64_t len) {
        std::int64_t local = 0;
        for (std::int64_t rep = 0; rep < len; ++rep) {
          const std::vector<std::size_t> perm = random_permutation(n, rng);
          Matrix m = Matrix::Zero(k, k);
          for (std::size_t i = 0; i < n; ++i)
            m += b1.row(static_cast<Index>(perm[i])).transpose() *
                 a1.row(static_cast<Index>(i));
          const double trace = trace_of_singular_values(m);
          const double m2 = std::clamp(1.0 - trace * trace, 0.0, 1.0);
          if (m2 <= observed) ++local;
        }
        return local;
      });

  return static_cast<double>(hits + 1) / static_cast<double>(permutations + 1);
}

namespace {

// Neighbor rankings for one configuration: for each item, the other items
// sorted by (Euclidean distance, label).
std::vector<std::vector<Index>> neighbor_order(const Configuration& config) {
  const Index n = config.size();
  std::vector<std::vector<Index>> order(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    std::vector<Index> others;
    others.reserve(static_cast<std::size_t>(n - 1));
    for (Index j = 0; j < n; ++j)
      if (j != i) others.push_back(j);
    std::sort(others.begin(), others.end(), [&](Index x, Index y) {
      const double dx = (config.coords().row(x) - config.coords().row(i)).norm();
      const double dy = (config.coords().row(y) - config.coords().row(i)).norm();
      if (dx != dy) return dx < dy;
      return config.labels()[static_cast<std::size_t>(x)] <
             config.labels()[static_cast<std::size_t>(y)];
    });
    order[static_cast<std::size_t>(i)] = std::move(others);
  }
  return order;
}

}  // namespace

AgreementResult agreement_rates(const Configuration& a, const Configuration& b,
                                Index max_k) {
  check_same_labels(a, b);
  const Index n = a.size();
  if (max_k < 1 || max_k > n - 2)
    raise(errc::k_out_of_range,
          "max_k must lie in [1, n-2] = [1, " + std::to_string(n - 2) + "]");

  const auto order_a = neighbor_order(a);
  const auto order_b = neighbor_order(b);

  AgreementResult result;
  result.per_k.resize(static_cast<std::size_t>(max_k));
  result.adjusted_per_k.resize(static_cast<std::size_t>(max_k));

  for (Index k = 1; k <= max_k; ++k) {
    double sum = 0.0;
    for (Index i = 0; i < n; ++i) {
      const auto& na = order_a[static_cast<std::size_t>(i)];
      const auto& nb = order_b[static_cast<std::size_t>(i)];
      std::unordered_set<Index> set_a(na.begin(), na.begin() + k);
      Index overlap = 0;
      for (Index t = 0; t < k; ++t)
        if (set_a.count(nb[static_cast<std::size_t>(t)])) ++overlap;
      sum += static_cast<double>(overlap) / static_cast<double>(k);
    }
    const double ar_k = sum / static_cast<double>(n);
    const double expected =
        static_cast<double>(k) / static_cast<double>(n - 1);
    result.per_k[static_cast<std::size_t>(k - 1)] = ar_k;
    result.adjusted_per_k[static_cast<std::size_t>(k - 1)] =
        (ar_k - expected) / (1.0 - expected);
  }

  result.ar = std::accumulate(result.per_k.begin(), result.per_k.end(), 0.0) /
              static_cast<double>(max_k);
  result.adjusted_ar = std::accumulate(result.adjusted_per_k.begin(),
                                       result.adjusted_per_k.end(), 0.0) /
                       static_cast<double>(max_k);
  return result;
}

namespace {

struct ActiveCluster {
  Index id;
  double size;
  std::string representative;  // smallest leaf label, for tie-breaking
};

Dendrogram upgma(std::vector<std::string> labels, Matrix distances) {
  const Index n = distances.rows();
  Dendrogram tree;
  tree.labels = std::move(labels);

  std::vector<ActiveCluster> active;
  active.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i)
    active.push_back({i, 1.0, tree.labels[static_cast<std::size_t>(i)]});

  Matrix d = std::move(distances);
  for (Index step = 0; step < n - 1; ++step) {
    std::size_t best_x = 0, best_y = 1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t x = 0; x < active.size(); ++x) {
      for (std::size_t y = x + 1; y < active.size(); ++y) {
        const double dist = d(static_cast<Index>(x), static_cast<Index>(y));
        bool better = dist < best;
        if (dist == best) {
          auto key = [&](std::size_t p, std::size_t q) {
            return std::minmax(active[p].representative,
                               active[q].representative);
          };
          better = key(x, y) < key(best_x, best_y);
        }
        if (better) {
          best = dist;
          best_x = x;
          best_y = y;
        }
      }
    }

    Merge merge;
    merge.a = std::min(active[best_x].id, active[best_y].id);
    merge.b = std::max(active[best_x].id, active[best_y].id);
    merge.height = best;
    tree.merges.push_back(merge);

    const double size_x = active[best_x].size;
    const double size_y = active[best_y].size;
    const std::size_t m = active.size();

    Matrix next(static_cast<Index>(m - 1), static_cast<Index>(m - 1));
    std::vector<ActiveCluster> next_active;
    next_active.reserve(m - 1);
    std::vector<std::size_t> keep;
    for (std::size_t p = 0; p < m; ++p)
      if (p != best_x && p != best_y) keep.push_back(p);

    for (std::size_t p = 0; p < keep.size(); ++p) {
      next_active.push_back(active[keep[p]]);
      for (std::size_t q = p + 1; q < keep.size(); ++q)
        next(static_cast<Index>(p), static_cast<Index>(q)) =
            next(static_cast<Index>(q), static_cast<Index>(p)) =
                d(static_cast<Index>(keep[p]), static_cast<Index>(keep[q]));
    }
    ActiveCluster merged;
    merged.id = n + step;
    merged.size = size_x + size_y;
    merged.representative = std::min(active[best_x].representative,
                                     active[best_y].representative);
    const Index last = static_cast<Index>(keep.size());
    for (std::size_t p = 0; p < keep.size(); ++p) {
      const double mixed =
          (size_x * d(static_cast<Index>(best_x), static_cast<Index>(keep[p])) +
           size_y * d(static_cast<Index>(best_y), static_cast<Index>(keep[p]))) /
          (size_x + size_y);
      next(static_cast<Index>(p), last) = next(last, static_cast<Index>(p)) =
          mixed;
    }
    next(last, last) = 0.0;
    next_active.push_back(std::move(merged));

    d = std::move(next);
    active = std::move(next_active);
  }
  return tree;
}

void check_labels_distinct(const std::vector<std::string>& labels) {
  std::unordered_set<std::string> seen;
  for (const auto& label : labels)
    if (!seen.insert(label).second)
      raise(errc::duplicate_label, "duplicate leaf label: " + label);
}

}  // namespace

Dendrogram hcluster(const Configuration& config) {
  const Index n = config.size();
  Matrix d = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      d(i, j) = d(j, i) =
          (config.coords().row(i) - config.coords().row(j)).norm();
  return upgma(config.labels(), std::move(d));
}

Dendrogram hcluster(const std::vector<std::string>& labels,
                    const Matrix& distances) {
  if (distances.rows() != distances.cols() ||
      distances.rows() != static_cast<Index>(labels.size()))
    raise(errc::dimension_mismatch, "distance matrix must be square, one "
                                    "row per label");
  if (labels.size() < 3)
    raise(errc::too_few_items, "clustering needs at least 3 items");
  check_labels_distinct(labels);
  if (!distances.allFinite())
    raise(errc::non_finite_input, "distances must be finite");
  for (Index i = 0; i < distances.rows(); ++i) {
    if (distances(i, i) != 0.0)
      raise(errc::invalid_domain, "self-distances must be zero");
    for (Index j = 0; j < distances.cols(); ++j) {
      if (distances(i, j) < 0.0)
        raise(errc::invalid_domain, "distances must be nonnegative");
      if (distances(i, j) != distances(j, i))
        raise(errc::asymmetric_distances,
              "distance matrix must be symmetric");
    }
  }
  return upgma(labels, distances);
}

Matrix cophenetic_distances(const Dendrogram& tree) {
  const Index n = static_cast<Index>(tree.labels.size());
  std::unordered_map<Index, std::vector<Index>> members;
  for (Index i = 0; i < n; ++i) members[i] = {i};

  Matrix coph = Matrix::Zero(n, n);
  for (std::size_t step = 0; step < tree.merges.size(); ++step) {
    const Merge& merge = tree.merges[step];
    const auto& left = members.at(merge.a);
    const auto& right = members.at(merge.b);
    for (Index i : left)
      for (Index j : right)
        coph(i, j) = coph(j, i) = merge.height;

    std::vector<Index> joined = left;
    joined.insert(joined.end(), right.begin(), right.end());
    members.erase(merge.a);
    members.erase(merge.b);
    members[n + static_cast<Index>(step)] = std::move(joined);
  }
  return coph;
}

double cophenetic_correlation(const Dendrogram& left,
                              const Dendrogram& right) {
  const std::size_t n = left.labels.size();
  std::unordered_map<std::string, Index> right_index;
  for (std::size_t i = 0; i < right.labels.size(); ++i)
    right_index[right.labels[i]] = static_cast<Index>(i);
  if (right.labels.size() != n)
    raise(errc::label_mismatch, "trees must share the same leaf labels");
  for (const auto& label : left.labels)
    if (!right_index.count(label))
      raise(errc::label_mismatch, "leaf missing from second tree: " + label);

  const Matrix coph_l = cophenetic_distances(left);
  const Matrix coph_r = cophenetic_distances(right);

  std::vector<double> xs, ys;
  xs.reserve(n * (n - 1) / 2);
  ys.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      xs.push_back(coph_l(static_cast<Index>(i), static_cast<Index>(j)));
      ys.push_back(coph_r(right_index.at(left.labels[i]),
                          right_index.at(left.labels[j])));
    }
  }

  const double count = static_cast<double>(xs.size());
  const double mean_x =
      std::accumulate(xs.begin(), xs.end(), 0.0) / count;
  const double mean_y =
      std::accumulate(ys.begin(), ys.end(), 0.0) / count;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t t = 0; t < xs.size(); ++t) {
    const double dx = xs[t] - mean_x;
    const double dy = ys[t] - mean_y;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    // Flat trees: correlation degenerates; identical vectors count as
    // perfect agreement, anything else as none.
    return xs == ys ? 1.0 : 0.0;
  }
  return sxy / std::sqrt(sxx * syy);
}

std::vector<Index> leaf_order(const Dendrogram& tree) {
  const Index n = static_cast<Index>(tree.labels.size());
  if (tree.merges.empty()) {
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    return order;
  }

  std::vector<Index> order;
  order.reserve(static_cast<std::size_t>(n));
  const Index root = n + static_cast<Index>(tree.merges.size()) - 1;
  std::vector<Index> stack = {root};
  while (!stack.empty()) {
    const Index id = stack.back();
    stack.pop_back();
    if (id < n) {
      order.push_back(id);
    } else {
      const Merge& merge = tree.merges[static_cast<std::size_t>(id - n)];
      stack.push_back(merge.b);
      stack.push_back(merge.a);
    }
  }
  return order;
}

std::string tanglegram_svg(const Dendrogram& left, const Dendrogram& right) {
  const Index n = static_cast<Index>(left.labels.size());
  const double corr = cophenetic_correlation(left, right);  // checks labels

  const double row_height = 18.0;
  const double top = 40.0, bottom = 16.0;
  const double tree_width = 240.0, pad = 8.0, label_band = 130.0,
               connector_band = 150.0;
  const double width =
      2 * (tree_width + pad + label_band) + connector_band;
  const double height = top + bottom + row_height * static_cast<double>(n);

  auto leaf_y = [&](double position) {
    return top + row_height * (position + 0.5);
  };

  struct Layout {
    std::unordered_map<Index, double> y;       // node id -> y
    std::unordered_map<Index, double> height;  // node id -> merge height
    double max_height = 0.0;
  };

  auto layout_tree = [&](const Dendrogram& tree) {
    Layout layout;
    const std::vector<Index> order = leaf_order(tree);
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      layout.y[order[pos]] = leaf_y(static_cast<double>(pos));
      layout.height[order[pos]] = 0.0;
    }
    for (std::size_t step = 0; step < tree.merges.size(); ++step) {
      const Merge& merge = tree.merges[step];
      const Index id = n + static_cast<Index>(step);
      layout.y[id] = 0.5 * (layout.y.at(merge.a) + layout.y.at(merge.b));
      layout.height[id] = merge.height;
      layout.max_height = std::max(layout.max_height, merge.height);
    }
    if (layout.max_height == 0.0) layout.max_height = 1.0;
    return layout;
  };

  const Layout lay_l = layout_tree(left);
  const Layout lay_r = layout_tree(right);

  // Leaves sit against the label band; roots at the outer edges.
  auto x_left = [&](double h) {
    return tree_width * (1.0 - h / lay_l.max_height);
  };
  auto x_right = [&](double h) {
    return width - tree_width * (1.0 - h / lay_r.max_height);
  };

  svg::Document doc(width, height);
  doc.text(width / 2, top / 2,
           "cophenetic r = " + svg::fmt(corr, 4),
           "text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"13\"");

  const std::string tree_stroke =
      "stroke=\"#333333\" stroke-width=\"1\" fill=\"none\"";
  auto draw_tree = [&](const Dendrogram& tree, const Layout& layout,
                       auto to_x) {
    for (std::size_t step = 0; step < tree.merges.size(); ++step) {
      const Merge& merge = tree.merges[step];
      const Index id = n + static_cast<Index>(step);
      const double xm = to_x(layout.height.at(id));
      const double ya = layout.y.at(merge.a);
      const double yb = layout.y.at(merge.b);
      doc.line(xm, ya, xm, yb, tree_stroke);
      doc.line(to_x(layout.height.at(merge.a)), ya, xm, ya, tree_stroke);
      doc.line(to_x(layout.height.at(merge.b)), yb, xm, yb, tree_stroke);
    }
  };
  draw_tree(left, lay_l, x_left);
  draw_tree(right, lay_r, x_right);

  std::unordered_map<std::string, double> right_leaf_y;
  for (Index i = 0; i < n; ++i)
    right_leaf_y[right.labels[static_cast<std::size_t>(i)]] = lay_r.y.at(i);

  const double conn_x1 = tree_width + pad + label_band;
  const double conn_x2 = conn_x1 + connector_band;
  for (Index i = 0; i < n; ++i) {
    const std::string& label = left.labels[static_cast<std::size_t>(i)];
    const double yl = lay_l.y.at(i);
    const double yr = right_leaf_y.at(label);
    doc.line(conn_x1, yl, conn_x2, yr,
             "stroke=\"#8888bb\" stroke-width=\"1\" class=\"connector\"");
    doc.text(tree_width + pad, yl + 4, label,
             "font-family=\"sans-serif\" font-size=\"11\"");
    doc.text(width - tree_width - pad, yr + 4, label,
             "font-family=\"sans-serif\" font-size=\"11\" "
             "text-anchor=\"end\"");
  }
  return doc.str();
}

}  // namespace crosstab

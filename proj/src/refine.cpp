#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <utility>

#include "adaptfv/errors.hpp"
#include "adaptfv/mesh.hpp"

namespace adaptfv
{

namespace
{

using EdgeKey = std::pair<int, int>;

EdgeKey key_of(int a, int b)
{
  return a < b ? EdgeKey{a, b} : EdgeKey{b, a};
}

// Triangle stored as (peak, b, c); the refinement edge is (b, c).
struct Bisected
{
  std::array<int, 3> v;
  int level;
};

Mesh bisect(const Mesh &mesh, const std::vector<int> &marked, int max_depth)
{
  const int nc = mesh.num_cells();
  std::vector<Bisected> tris(nc);
  std::map<EdgeKey, std::vector<int>> edge_cells;
  for (int K = 0; K < nc; K++)
  {
    const auto &l = mesh.cells[K];
    const int m = mesh.newest_vertex[K];
    tris[K] = {{l[m], l[(m + 1) % 3], l[(m + 2) % 3]}, mesh.levels[K]};
    for (int i = 0; i < 3; i++)
    {
      edge_cells[key_of(l[i], l[(i + 1) % 3])].push_back(K);
    }
  }

  // Closure: a triangle with any marked edge must have its refinement edge marked.
  std::set<EdgeKey> marked_edges;
  std::vector<EdgeKey> work;
  auto mark = [&](const EdgeKey &e) {
    if (marked_edges.insert(e).second)
    {
      work.push_back(e);
    }
  };
  for (int K : marked)
  {
    if (K < 0 || K >= nc)
    {
      throw Error(ErrorCode::InvalidInput, "marked cell " + std::to_string(K) + " out of range");
    }
    mark(key_of(tris[K].v[1], tris[K].v[2]));
  }
  while (!work.empty())
  {
    const EdgeKey e = work.back();
    work.pop_back();
    for (int K : edge_cells[e])
    {
      mark(key_of(tris[K].v[1], tris[K].v[2]));
    }
  }

  std::vector<Vec2> vertices = mesh.vertices;
  std::map<EdgeKey, int> midpoint;
  auto midpoint_of = [&](int a, int b) {
    auto [it, inserted] = midpoint.try_emplace(key_of(a, b), static_cast<int>(vertices.size()));
    if (inserted)
    {
      vertices.push_back(0.5 * (vertices[a] + vertices[b]));
    }
    return it->second;
  };

  std::vector<std::vector<int>> loops;
  std::vector<int> levels;
  // Children of (p, b, c) with m the midpoint of (b, c): (m, p, b), (m, c, p).
  auto emit = [&](auto &&self, const Bisected &t, int depth) -> void {
    if (!marked_edges.count(key_of(t.v[1], t.v[2])))
    {
      loops.push_back({t.v[0], t.v[1], t.v[2]});
      levels.push_back(t.level);
      return;
    }
    if (depth > max_depth)
    {
      throw Error(ErrorCode::RefinementLimit, "bisection depth exceeds " + std::to_string(max_depth));
    }
    const int m = midpoint_of(t.v[1], t.v[2]);
    self(self, Bisected{{m, t.v[0], t.v[1]}, t.level + 1}, depth + 1);
    self(self, Bisected{{m, t.v[2], t.v[0]}, t.level + 1}, depth + 1);
  };
  for (const auto &t : tris)
  {
    emit(emit, t, 0);
  }
  return rebuild_like(mesh, vertices, loops, std::vector<int>(loops.size(), 0), levels);
}

bool is_corner(const Mesh &mesh, const std::vector<int> &loop, int i)
{
  const int n = static_cast<int>(loop.size());
  const Vec2 &prev = mesh.vertices[loop[(i + n - 1) % n]];
  const Vec2 &cur = mesh.vertices[loop[i]];
  const Vec2 &next = mesh.vertices[loop[(i + 1) % n]];
  const Vec2 e0 = cur - prev, e1 = next - cur;
  const double cr = e0.x() * e1.y() - e0.y() * e1.x();
  return std::abs(cr) > 1e-10 * e0.norm() * e1.norm();
}

Mesh quadrisect(const Mesh &mesh, const std::vector<int> &marked, int max_depth)
{
  const int nc = mesh.num_cells();
  std::vector<char> refine(nc, 0);
  std::vector<std::pair<int, int>> work;  // (cell, cascade depth)
  for (int K : marked)
  {
    if (K < 0 || K >= nc)
    {
      throw Error(ErrorCode::InvalidInput, "marked cell " + std::to_string(K) + " out of range");
    }
    if (!refine[K])
    {
      refine[K] = 1;
      work.emplace_back(K, 0);
    }
  }
  // A coarser neighbor of a refined cell must be refined as well, otherwise its
  // face would carry two hanging nodes.
  while (!work.empty())
  {
    const auto [K, depth] = work.back();
    work.pop_back();
    for (int f : mesh.cell_faces[K])
    {
      const Face &F = mesh.faces[f];
      if (F.boundary())
      {
        continue;
      }
      const int L = F.left == K ? F.right : F.left;
      if (!refine[L] && mesh.levels[L] < mesh.levels[K])
      {
        if (depth + 1 > max_depth)
        {
          throw Error(ErrorCode::RefinementLimit,
                      "one-hanging-node closure exceeds depth " + std::to_string(max_depth));
        }
        refine[L] = 1;
        work.emplace_back(L, depth + 1);
      }
    }
  }

  std::vector<Vec2> vertices = mesh.vertices;
  std::map<EdgeKey, int> side_midpoint;  // keyed by the corners of a refined side
  std::vector<std::vector<int>> loops;
  std::vector<int> levels;
  std::vector<int> keep;

  for (int K = 0; K < nc; K++)
  {
    if (!refine[K])
    {
      keep.push_back(K);
      continue;
    }
    const auto &loop = mesh.cells[K];
    const int n = static_cast<int>(loop.size());
    std::vector<int> corners;
    for (int i = 0; i < n; i++)
    {
      if (is_corner(mesh, loop, i))
      {
        corners.push_back(i);
      }
    }
    const int nk = static_cast<int>(corners.size());
    Vec2 center = Vec2::Zero();
    for (int i : corners)
    {
      center += mesh.vertices[loop[i]];
    }
    center /= nk;
    const int center_id = static_cast<int>(vertices.size());
    vertices.push_back(center);

    // Per side: loop positions strictly between the corners and the midpoint id.
    std::vector<std::vector<int>> first_half(nk), second_half(nk);
    std::vector<int> mid(nk);
    for (int s = 0; s < nk; s++)
    {
      const int a = corners[s], b = corners[(s + 1) % nk];
      std::vector<int> inner;
      for (int i = (a + 1) % n; i != b; i = (i + 1) % n)
      {
        inner.push_back(loop[i]);
      }
      const Vec2 m = 0.5 * (mesh.vertices[loop[a]] + mesh.vertices[loop[b]]);
      if (inner.size() > 1)
      {
        throw Error(ErrorCode::RefinementLimit, "cell " + std::to_string(K) + " side carries " +
                                                    std::to_string(inner.size()) + " hanging nodes");
      }
      if (inner.size() == 1)
      {
        if ((mesh.vertices[inner[0]] - m).norm() > 1e-10 * (mesh.vertices[loop[a]] - m).norm())
        {
          throw Error(ErrorCode::InvalidInput,
                      "cell " + std::to_string(K) + " hanging node is not a side midpoint");
        }
        mid[s] = inner[0];
      }
      else
      {
        auto [it, inserted] =
            side_midpoint.try_emplace(key_of(loop[a], loop[b]), static_cast<int>(vertices.size()));
        if (inserted)
        {
          vertices.push_back(m);
        }
        mid[s] = it->second;
      }
    }
    for (int s = 0; s < nk; s++)
    {
      const int prev = (s + nk - 1) % nk;
      loops.push_back({loop[corners[s]], mid[s], center_id, mid[prev]});
      levels.push_back(mesh.levels[K] + 1);
    }
  }

  // Unrefined cells pick up the new midpoints on their sides.
  std::vector<std::vector<int>> kept_loops;
  std::vector<int> kept_levels;
  for (int K : keep)
  {
    const auto &loop = mesh.cells[K];
    const int n = static_cast<int>(loop.size());
    std::vector<int> out;
    for (int i = 0; i < n; i++)
    {
      out.push_back(loop[i]);
      const auto it = side_midpoint.find(key_of(loop[i], loop[(i + 1) % n]));
      if (it != side_midpoint.end())
      {
        out.push_back(it->second);
      }
    }
    kept_loops.push_back(std::move(out));
    kept_levels.push_back(mesh.levels[K]);
  }
  kept_loops.insert(kept_loops.end(), loops.begin(), loops.end());
  kept_levels.insert(kept_levels.end(), levels.begin(), levels.end());
  return rebuild_like(mesh, vertices, kept_loops, {}, kept_levels);
}

}  // namespace

Mesh refine(const Mesh &mesh, const std::vector<int> &marked, int max_depth)
{
  if (marked.empty())
  {
    return mesh;
  }
  if (mesh.kind == MeshKind::simplicial)
  {
    return bisect(mesh, marked, max_depth);
  }
  return quadrisect(mesh, marked, max_depth);
}

Mesh uniform_refine(const Mesh &mesh)
{
  if (mesh.kind == MeshKind::polytopal)
  {
    std::vector<int> all(mesh.num_cells());
    for (int K = 0; K < mesh.num_cells(); K++)
    {
      all[K] = K;
    }
    return refine(mesh, all);
  }
  // Red refinement: four similar children; the newest vertex of each child is
  // opposite its longest edge.
  std::vector<Vec2> vertices = mesh.vertices;
  std::map<EdgeKey, int> midpoint;
  auto mid = [&](int a, int b) {
    const auto [it, added] = midpoint.try_emplace(key_of(a, b), static_cast<int>(vertices.size()));
    if (added)
    {
      vertices.push_back(0.5 * (mesh.vertices[a] + mesh.vertices[b]));
    }
    return it->second;
  };
  std::vector<std::vector<int>> loops;
  std::vector<int> newest, levels;
  for (int K = 0; K < mesh.num_cells(); K++)
  {
    const auto &l = mesh.cells[K];
    const int m01 = mid(l[0], l[1]), m12 = mid(l[1], l[2]), m20 = mid(l[2], l[0]);
    for (const std::array<int, 3> &c : {std::array<int, 3>{l[0], m01, m20}, std::array<int, 3>{m01, l[1], m12},
                                        std::array<int, 3>{m20, m12, l[2]}, std::array<int, 3>{m12, m20, m01}})
    {
      int opposite = 0;
      double longest = -1.0;
      for (int i = 0; i < 3; i++)
      {
        const double len = (vertices[c[(i + 1) % 3]] - vertices[c[(i + 2) % 3]]).norm();
        if (len > longest)
        {
          longest = len;
          opposite = i;
        }
      }
      loops.push_back({c[0], c[1], c[2]});
      newest.push_back(opposite);
      levels.push_back(mesh.levels[K] + 2);
    }
  }
  return rebuild_like(mesh, vertices, loops, newest, levels);
}

}  // namespace adaptfv

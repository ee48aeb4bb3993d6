#include "lapeig/mesh.hpp"

#include <doctest.h>

#include <sstream>

using namespace lapeig;

TEST_CASE("uniform square counts and orientation")
{
    const Mesh m = uniform_square(8);
    CHECK(m.num_nodes() == 81);
    CHECK(m.num_triangles() == 128);
    CHECK(m.num_dofs() == 49);
    CHECK(m.boundary_nodes().size() == 32);
    CHECK(m.total_area() == doctest::Approx(1.0).epsilon(1e-14));
    for (int t = 0; t < m.num_triangles(); ++t)
        CHECK(m.signed_area(t) > 0);
    CHECK(is_conforming(m));
}

TEST_CASE("dofs are free nodes in increasing node order")
{
    const Mesh m = uniform_square(4, -1.0, 1.0);
    CHECK(m.num_dofs() == 9);
    for (int d = 1; d < m.num_dofs(); ++d)
        CHECK(m.node_of_dof(d) > m.node_of_dof(d - 1));
    for (int d = 0; d < m.num_dofs(); ++d)
        CHECK(m.dof_of_node(m.node_of_dof(d)) == d);
    CHECK(m.node(m.node_of_dof(4)).norm() == doctest::Approx(0.0));
}

TEST_CASE("both diagonals give the same counts")
{
    const Mesh up = uniform_square(5, 0, 1, Diagonal::up);
    const Mesh down = uniform_square(5, 0, 1, Diagonal::down);
    CHECK(up.num_triangles() == down.num_triangles());
    CHECK(down.total_area() == doctest::Approx(1.0));
    CHECK(is_conforming(down));
}

TEST_CASE("invalid square arguments")
{
    CHECK_THROWS_AS(uniform_square(0), std::invalid_argument);
    CHECK_THROWS_AS(uniform_square(4, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("support patch of an interior node")
{
    const Mesh m = uniform_square(4);
    const SupportPatch p = support_patch(m, m.dof_of_node(6));
    CHECK(p.triangles.size() == 6);
    CHECK(p.nodes.size() == 7);
    CHECK(p.diameter == doctest::Approx(std::sqrt(2.0) / 4));
}

TEST_CASE("re-entrant corner domain")
{
    const Mesh m = reentrant_corner(20);
    CHECK(is_conforming(m));
    CHECK(m.total_area() == doctest::Approx(reentrant_domain_area()).epsilon(1e-12));
    for (int t = 0; t < m.num_triangles(); ++t) {
        CHECK(m.signed_area(t) > 0);
        CHECK(in_reentrant_domain(m.barycenter(t)));
    }
    CHECK_FALSE(in_reentrant_domain(Point(0.9, 0.5)));
    CHECK(in_reentrant_domain(Point(0.9, 0.9)));
    CHECK(in_reentrant_domain(Point(0.05, 0.05)));
}

TEST_CASE("local refinement stays conforming")
{
    const Mesh m = uniform_square(10);
    const auto box = RegionPredicate::box(0, 0.2, 0, 0.2);
    const RefineResult one = refine_local(m, box, 1);
    const RefineResult three = refine_local(m, box, 3);
    CHECK_FALSE(one.region_missed);
    CHECK(is_conforming(one.mesh));
    CHECK(is_conforming(three.mesh));
    CHECK(one.mesh.num_triangles() > m.num_triangles());
    CHECK(three.mesh.num_triangles() > one.mesh.num_triangles());
    CHECK(three.mesh.total_area() == doctest::Approx(1.0).epsilon(1e-13));
    double hmin = 1.0;
    for (int t = 0; t < three.mesh.num_triangles(); ++t)
        if (box.contains(three.mesh.barycenter(t)))
            hmin = std::min(hmin, three.mesh.diameter(t));
    CHECK(hmin < uniform_square(10).diameter(0) / 2);
}

TEST_CASE("refinement outside the domain is reported")
{
    const Mesh m = uniform_square(4);
    const RefineResult r = refine_local(m, RegionPredicate::box(2, 3, 2, 3), 2);
    CHECK(r.region_missed);
    CHECK(r.mesh.num_triangles() == m.num_triangles());
}

TEST_CASE("mesh file round trip")
{
    const Mesh m = refine_local(uniform_square(4), RegionPredicate::box(0, 0.5, 0, 0.5), 1).mesh;
    std::stringstream s;
    write_mesh(s, m);
    const Mesh r = read_mesh(s);
    CHECK(r.num_nodes() == m.num_nodes());
    CHECK(r.num_triangles() == m.num_triangles());
    CHECK(r.boundary_nodes() == m.boundary_nodes());
    for (int i = 0; i < m.num_nodes(); ++i)
        CHECK(r.node(i) == m.node(i));
    for (int t = 0; t < m.num_triangles(); ++t)
        CHECK(r.triangle(t) == m.triangle(t));
}

TEST_CASE("malformed mesh file")
{
    std::stringstream s("3 1 3\n0 0\n1 0\n");
    CHECK_THROWS_AS(read_mesh(s), std::invalid_argument);
}

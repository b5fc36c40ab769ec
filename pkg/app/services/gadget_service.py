"""
Gadget Service
Lower-bound graph families and their subgraph covers:

- r-join gadgets G_1 = K_chi, G_j = G_(j-1) 2r-joined with K_chi
- Klein-bottle quadrangulations of a W x H grid
- cheating instances assembled from copies of cover-element neighborhoods
"""
import logging

import numpy as np

from config import Config
from app.exceptions import BadParams, CertificateFailed, DoesNotFit, SizeLimit
from app.models.cover import (
    CheatingInstance, ElementCertificate, SubgraphCover, VIEW_INDUCED, VIEW_LOCAL,
)
from app.models.reports import ValidationReport
from app.services.analysis_service import AnalysisService
from app.services.graph_service import GraphService

logger = logging.getLogger(__name__)


def _kb_ids(i, j, width, height):
    """Representative id of grid points under the Klein-bottle identifications"""
    i = np.asarray(i, dtype=np.int64)
    j = np.asarray(j, dtype=np.int64)
    top = j == height
    i = np.where(top, width - i, i)
    j = np.where(top, 0, j)
    i = np.where(i == width, 0, i)
    return j * width + i


def _box(xs, ys):
    """All grid points of xs x ys as two flat arrays"""
    xx, yy = np.meshgrid(np.asarray(list(xs)), np.asarray(list(ys)), indexing='ij')
    return xx.ravel(), yy.ravel()


class GadgetService:

    # ------------------------------------------------------------------
    # r-join gadgets
    # ------------------------------------------------------------------

    @staticmethod
    def rjoin_size(chi: int, r: int, k: int) -> int:
        """((2r chi + 1)^k - 1) / (2r)"""
        size = chi
        for _ in range(k - 1):
            size = size * (1 + 2 * r * chi) + chi
        return size

    @staticmethod
    def _check_rjoin(chi, r, k):
        errors = {}
        if chi < 2:
            errors['chi'] = 'chi must be at least 2'
        if r < 2:
            errors['r'] = 'r must be at least 2'
        if k < 1:
            errors['k'] = 'k must be at least 1'
        if errors:
            raise BadParams('Invalid r-join parameters', **errors)
        size = GadgetService.rjoin_size(chi, r, k)
        if size > Config.MAX_GADGET_NODES:
            raise SizeLimit(f"r-join gadget would have {size} nodes", limit=Config.MAX_GADGET_NODES)
        return size

    @staticmethod
    def rjoin_gadget(chi: int, r: int, k: int):
        """
        Build G_k; labels carry the recursive coordinates

        Returns:
            Graph with ((2r chi + 1)^k - 1)/(2r) nodes
        """
        size = GadgetService._check_rjoin(chi, r, k)
        clique = GraphService.complete_graph(chi)
        g = GraphService.build_graph(chi, clique.edges(), labels=[f"1:{y}" for y in range(chi)])
        for level in range(2, k + 1):
            g = GraphService.r_join(g, clique, 2 * r, h_labels=[f"{level}:{y}" for y in range(chi)])
        if g.n != size or not GraphService.is_connected(g):
            logger.error(f"r-join gadget ({chi}, {r}, {k}) failed its structural check")
            raise CertificateFailed("r-join gadget has the wrong size or is disconnected", n=g.n)
        g.meta = {'family': 'rjoin', 'chi': chi, 'r': r, 'k': k}
        logger.info(f"Built r-join gadget chi={chi} r={r} k={k}: n={g.n} m={g.m}")
        return g

    @staticmethod
    def _rjoin_elements(chi, r, k):
        """Cover elements per level plus a projection coloring for each"""
        t = (2 * r) // 3
        layers = 2 * r
        elements = [np.arange(chi)]
        hints = [np.arange(chi) + 1]
        n_g = chi
        for _ in range(2, k + 1):
            n_h = chi
            block = n_g * n_h
            total = n_g + layers * block + n_h

            def layered(nodes, first, last):
                out = [n_g + (layer - 1) * block + nodes[:, None] * n_h + np.arange(n_h)[None, :]
                       for layer in range(first, last + 1)]
                return np.concatenate([o.ravel() for o in out])

            to_g = GraphService.projection(n_g, n_h, layers, 'g')
            to_h = GraphService.projection(n_g, n_h, layers, 'h')
            next_elements, next_hints = [], []
            for element, hint in zip(elements, hints):
                next_elements.append(np.concatenate([element, layered(element, 1, t + 2)]))
                lifted = np.ones(total, dtype=np.int64)
                lifted[to_g >= 0] = hint[to_g[to_g >= 0]]
                next_hints.append(lifted)

            next_elements.append(np.concatenate([
                layered(np.arange(n_g), t + 1, layers),
                n_g + layers * block + np.arange(n_h),
            ]))
            top = np.ones(total, dtype=np.int64)
            top[to_h >= 0] = to_h[to_h >= 0] + 1
            next_hints.append(top)

            elements, hints, n_g = next_elements, next_hints, total
        return elements, hints

    @staticmethod
    def rjoin_cover(chi: int, r: int, k: int, host=None) -> SubgraphCover:
        """
        k-element cover of G_k with radius T = floor(2r/3)

        Raises:
            BadParams: r < 3 or k < 2
            CertificateFailed: a computed certificate does not hold
        """
        if r < 3:
            raise BadParams(f"r-join covers need r >= 3, got {r}")
        if k < 2:
            raise BadParams(f"r-join covers need k >= 2, got {k}")
        host = host or GadgetService.rjoin_gadget(chi, r, k)
        t = (2 * r) // 3
        elements, hints = GadgetService._rjoin_elements(chi, r, k)
        cover = SubgraphCover(host, elements, t, 'rjoin', {'chi': chi, 'r': r, 'k': k}, VIEW_INDUCED)
        cover.certificates = [GadgetService._element_certificate(host, e, t, VIEW_INDUCED, hint)
                              for e, hint in zip(cover.elements, hints)]
        GadgetService._require(host, cover, chi)
        return cover

    # ------------------------------------------------------------------
    # Klein-bottle gadgets
    # ------------------------------------------------------------------

    @staticmethod
    def kb_gadget(width: int, height: int):
        """
        Quotient of the (W+1) x (H+1) grid under (i,0) ~ (W-i,H) and (0,j) ~ (W,j)

        Node (i, j) with 0 <= i < W, 0 <= j < H has id j*W + i.
        """
        if width < 2 or height < 2:
            raise BadParams(f"KB gadget needs W, H >= 2, got {width}x{height}")
        if width * height > Config.MAX_GADGET_NODES:
            raise SizeLimit(f"KB gadget would have {width * height} nodes")
        hx, hy = _box(range(width), range(height + 1))
        vx, vy = _box(range(width + 1), range(height))
        u = np.concatenate([_kb_ids(hx, hy, width, height), _kb_ids(vx, vy, width, height)])
        v = np.concatenate([_kb_ids(hx + 1, hy, width, height), _kb_ids(vx, vy + 1, width, height)])
        keep = u != v
        labels = [f"{i},{j}" for j in range(height) for i in range(width)]
        return GraphService.build_graph(
            width * height, np.column_stack([u[keep], v[keep]]), labels=labels,
            meta={'family': 'kb', 'w': width, 'hh': height},
        )

    @staticmethod
    def kb_parity(width: int, height: int) -> dict:
        """
        Orientation parity of the quadrangulation

        Every face is walked counterclockwise in grid coordinates; boundary
        edges are folded back into the fundamental domain. An edge walked in
        the same direction by both of its faces breaks orientation
        consistency; the gadget is an odd quadrangulation iff the number of
        such edges is odd.
        """
        if width < 2 or height < 2:
            raise BadParams(f"KB gadget needs W, H >= 2, got {width}x{height}")

        def fold(p, q):
            (px, py), (qx, qy) = p, q
            if py == height and qy == height:
                return (width - px, 0), (width - qx, 0)
            if px == width and qx == width:
                return (0, py), (0, qy)
            return p, q

        walks = {}
        for x in range(width):
            for y in range(height):
                corners = [(x, y), (x + 1, y), (x + 1, y + 1), (x, y + 1)]
                for a in range(4):
                    p, q = fold(corners[a], corners[(a + 1) % 4])
                    key = (min(p, q), max(p, q))
                    walks.setdefault(key, []).append(1 if p < q else -1)

        breaking = sorted(key for key, dirs in walks.items() if len(dirs) == 2 and dirs[0] == dirs[1])
        return {
            'w': width,
            'hh': height,
            'parity': 'odd' if len(breaking) % 2 else 'even',
            'count': len(breaking),
            'breaking_edges': [[list(p), list(q)] for p, q in breaking],
        }

    @staticmethod
    def kb_reference_patch(width: int, height: int, radius: int) -> tuple:
        """
        Q^T: a ((W+5)/2) x ((H+5)/2) lattice rectangle with its radius-T view

        Returns:
            tuple: (view Graph, lattice ids of the view, lattice width)
        """
        a, b = (width + 5) // 2, (height + 5) // 2
        lattice_w = a + 2 * radius
        lattice = GraphService.grid_graph(lattice_w, b + 2 * radius)
        xs, ys = _box(range(radius, radius + a), range(radius, radius + b))
        view, region = GraphService.t_view(lattice, ys * lattice_w + xs, radius)
        return view, region, lattice_w

    @staticmethod
    def kb_core_patch(width: int, height: int):
        """Q itself: the ((W+5)/2) x ((H+5)/2) grid every cover element must induce"""
        return GraphService.grid_graph((width + 5) // 2, (height + 5) // 2)

    @staticmethod
    def kb_cover(width: int, height: int, host=None) -> SubgraphCover:
        """
        Four-element cover with T = floor((min(W,H) - 5) / 4)

        Every element is a ((W+5)/2) x ((H+5)/2) grid patch: a band of rows
        on one side of the twisted seam plus two rows on the other side, whose
        columns appear mirrored. Certificates compare radius-T views, not
        induced neighborhoods: when 2T = (W-5)/2 the neighborhood spans the
        whole width and its two outer rings become adjacent across the seam.
        Those edges join nodes at distance exactly T and no T-round algorithm
        reads them.

        Raises:
            BadParams: W or H even or below 7 (at 5 the first element is the
                whole gadget, which is not 2-colorable)
        """
        errors = {}
        for name, value in (('w', width), ('hh', height)):
            if value % 2 == 0 or value < 7:
                errors[name] = f"must be odd and at least 7, got {value}"
        if errors:
            raise BadParams('Invalid KB cover parameters', **errors)

        host = host or GadgetService.kb_gadget(width, height)
        t = (min(width, height) - 5) // 4
        w, h = width, height
        wide = list(range(0, (w + 1) // 2 + 1)) + [w - 1, w]
        narrow = [0, 1] + list(range((w - 1) // 2, w + 1))
        low = range(0, (h + 1) // 2 + 1)
        top = range(h - 1, h + 1)
        upper = range((h - 1) // 2, h + 1)
        bottom = range(0, 2)

        def part(*boxes):
            ids = [_kb_ids(*_box(xs, ys), w, h) for xs, ys in boxes]
            return np.unique(np.concatenate(ids))

        # row H is row 0 with columns mirrored, so wide at one end meets narrow at the other
        elements = [
            part((wide, low), (narrow, top)),
            part((narrow, low), (wide, top)),
            part((wide, bottom), (narrow, upper)),
            part((narrow, bottom), (wide, upper)),
        ]
        reference, _, _ = GadgetService.kb_reference_patch(width, height, t)
        core = GadgetService.kb_core_patch(width, height)
        cover = SubgraphCover(host, elements, t, 'kb', {'w': width, 'hh': height}, VIEW_LOCAL)
        cover.certificates = [
            GadgetService._element_certificate(host, e, t, VIEW_LOCAL, reference=reference, core=core)
            for e in cover.elements
        ]
        GadgetService._require(host, cover, 2)
        return cover

    @staticmethod
    def build_cover(family: str, params: dict) -> SubgraphCover:
        if family == 'rjoin':
            return GadgetService.rjoin_cover(int(params['chi']), int(params['r']), int(params['k']))
        if family == 'kb':
            return GadgetService.kb_cover(int(params['w']), int(params['hh']))
        raise BadParams(f"Unknown gadget family '{family}'", allowed=['rjoin', 'kb'])

    # ------------------------------------------------------------------
    # Certificates
    # ------------------------------------------------------------------

    @staticmethod
    def element_view(host, element, radius: int, view_mode: str) -> tuple:
        """What a radius-T algorithm sees around an element: (Graph, host ids)"""
        if view_mode == VIEW_LOCAL:
            return GraphService.t_view(host, element, radius)
        region = GraphService.neighborhood_of_set(host, element, radius)
        view, _ = GraphService.induced_subgraph(host, region)
        return view, region

    @staticmethod
    def _element_certificate(host, element, radius, view_mode, hint=None, reference=None,
                             core=None) -> ElementCertificate:
        view, region = GadgetService.element_view(host, element, radius, view_mode)
        view_hint = None if hint is None else np.asarray(hint)[region]
        chi = AnalysisService.exact_chromatic_number(view, hint=view_hint)

        inner, _ = GraphService.induced_subgraph(host, element)
        dist = host.distances_from(element, limit=radius)
        at_radius = np.flatnonzero(dist == radius)

        isomorphic = None
        if reference is not None:
            isomorphic, _ = GraphService.is_isomorphic(view, reference)
        if core is not None and isomorphic:
            isomorphic, _ = GraphService.is_isomorphic(inner, core)
        return ElementCertificate(
            chi=chi.chi,
            coloring=chi.coloring,
            connected=GraphService.is_connected(inner),
            witness=int(at_radius.max()) if at_radius.size else -1,
            isomorphic=isomorphic,
        )

    @staticmethod
    def verify_cover(host, cover: SubgraphCover, expected_chi: int) -> ValidationReport:
        """
        Re-derive every cover property from scratch

        Clauses: union_nodes, union_edges, one_ball, local_chi, connected,
        distance_T_witness and, for KB covers, grid_patch.
        """
        report = ValidationReport(subject=f"{cover.family}_cover")
        n = host.n
        masks = np.zeros((cover.size, n), dtype=bool)
        for i, element in enumerate(cover.elements):
            masks[i, element] = True

        # 1. UNION of nodes and edges
        missing = np.flatnonzero(~masks.any(axis=0))
        report.check('union_nodes', missing.size == 0, f"nodes {missing[:10].tolist()} uncovered")
        edges = host.edges()
        if edges.size:
            inside = (masks[:, edges[:, 0]] & masks[:, edges[:, 1]]).any(axis=0)
            report.check('union_edges', bool(inside.all()),
                         f"edge {edges[int(np.argmin(inside))].tolist()} in no element")
        report.clauses.setdefault('union_edges', True)

        # 2. CLOSED 1-BALLS inside one element
        adj = host.adjacency
        holds = np.zeros(n, dtype=bool)
        for i in range(cover.size):
            leaks = adj @ (~masks[i]).astype(np.int64) > 0
            holds |= masks[i] & ~leaks
        report.check('one_ball', bool(holds.all()),
                     f"1-ball of node {int(np.argmin(holds))} spans several elements")

        # 3. PER-ELEMENT certificates
        reference = core = None
        if cover.family == 'kb':
            w, h = cover.params['w'], cover.params['hh']
            reference, _, _ = GadgetService.kb_reference_patch(w, h, cover.radius)
            core = GadgetService.kb_core_patch(w, h)
        certificates = []
        for i, element in enumerate(cover.elements):
            hint = None
            if i < len(cover.certificates) and cover.certificates[i].coloring:
                _, region = GadgetService.element_view(host, element, cover.radius, cover.view_mode)
                if len(region) == len(cover.certificates[i].coloring):
                    hint = np.ones(n, dtype=np.int64)
                    hint[region] = cover.certificates[i].coloring
            cert = GadgetService._element_certificate(host, element, cover.radius, cover.view_mode,
                                                      hint=hint, reference=reference, core=core)
            certificates.append(cert)
            report.check('local_chi', cert.chi == expected_chi,
                         f"element {i + 1} view has chi {cert.chi}, expected {expected_chi}")
            report.check('connected', cert.connected, f"element {i + 1} is disconnected")
            report.check('distance_T_witness', cert.witness >= 0,
                         f"element {i + 1} has no node at distance {cover.radius}")
            if reference is not None:
                report.check('grid_patch', bool(cert.isomorphic), f"element {i + 1} is not Q or its view is not Q^T")
        report.metrics['certificates'] = [c.to_dict() for c in certificates]
        report.metrics['T'] = cover.radius
        return report

    @staticmethod
    def _require(host, cover, expected_chi):
        for i, cert in enumerate(cover.certificates):
            ok = (cert.chi == expected_chi and cert.connected and cert.witness >= 0
                  and cert.isomorphic in (None, True))
            if not ok:
                logger.error(f"{cover.family} cover element {i + 1} failed: {cert.to_dict()}")
                raise CertificateFailed(f"Cover element {i + 1} failed its certificate",
                                        element=i + 1, certificate=cert.to_dict())
        logger.info(f"{cover.family} cover {cover.params}: {cover.size} elements, T={cover.radius}")

    # ------------------------------------------------------------------
    # Cheating instances
    # ------------------------------------------------------------------

    @staticmethod
    def assemble_cheating_instance(family: str, params: dict, indices, n: int = None,
                                   target: tuple = None, cover: SubgraphCover = None) -> CheatingInstance:
        """
        Copies of cover-element neighborhoods glued into one family member

        Args:
            family: 'rjoin' (connected chi-chromatic target) or 'kb' (grid target)
            params: gadget parameters
            indices: 1-based element index per copy (the vector x)
            n: target size for 'rjoin' (defaults to the total patch size)
            target: (W, H) target grid for 'kb'
            cover: prebuilt cover to reuse

        Raises:
            DoesNotFit: no copies, or the copies do not fit the target
            CertificateFailed: the assembled graph is not in its family
        """
        indices = [int(x) for x in indices]
        if not indices:
            raise DoesNotFit("A cheating instance needs at least one copy")
        cover = cover or GadgetService.build_cover(family, params)
        bad = [x for x in indices if not 1 <= x <= cover.size]
        if bad:
            raise BadParams(f"Element indices must lie in 1..{cover.size}", indices=bad)
        if family == 'rjoin':
            return GadgetService._assemble_chromatic(cover, indices, n)
        return GadgetService._assemble_grid(cover, indices, target)

    @staticmethod
    def _assemble_chromatic(cover, indices, n):
        host, radius = cover.host, cover.radius
        chi = int(cover.params['chi'])
        views, regions, witnesses, hints = [], [], [], []
        for x in indices:
            element = cover.elements[x - 1]
            view, region = GadgetService.element_view(host, element, radius, VIEW_INDUCED)
            cert = cover.certificates[x - 1]
            views.append(view)
            regions.append(region)
            witnesses.append(int(np.searchsorted(region, cert.witness)))
            hints.append(np.asarray(cert.coloring, dtype=np.int64))

        union, offsets = GraphService.disjoint_union(views)
        patch_total = union.n
        n = patch_total if n is None else int(n)
        if n < patch_total:
            raise DoesNotFit(f"Target size {n} is below the {patch_total} patch nodes", needed=patch_total)

        # 1. LINK consecutive copies at their distance-T witnesses
        edges = union.edges().tolist()
        coloring = []
        for j, (offset, witness, hint) in enumerate(zip(offsets, witnesses, hints)):
            colors = hint.copy()
            if j > 0:
                prev_color = coloring[offsets[j - 1] + witnesses[j - 1]]
                if colors[witness] == prev_color:
                    swap = prev_color % chi + 1
                    colors = np.where(colors == prev_color, swap, np.where(colors == swap, prev_color, colors))
                edges.append((offsets[j - 1] + witnesses[j - 1], offset + witness))
            coloring.extend(colors.tolist())

        # 2. FILLER path hanging off the last witness
        anchor = offsets[-1] + witnesses[-1]
        for node in range(patch_total, n):
            edges.append((anchor, node))
            coloring.append(coloring[anchor] % chi + 1)
            anchor = node

        graph = GraphService.build_graph(n, edges, meta={'family': 'rjoin-cheating', 'chi': chi})
        if not GraphService.is_connected(graph):
            raise CertificateFailed("Assembled instance is disconnected")
        cert = AnalysisService.exact_chromatic_number(graph, hint=coloring)
        if cert.chi != chi:
            raise CertificateFailed(f"Assembled instance has chi {cert.chi}, expected {chi}", chi=cert.chi)

        patches, maps = [], []
        for x, offset, region in zip(indices, offsets, regions):
            mapping = {int(u): offset + i for i, u in enumerate(region)}
            maps.append(mapping)
            patches.append(np.array([mapping[int(u)] for u in cover.elements[x - 1]], dtype=np.int64))
        GadgetService._require_untouched(graph, host, cover, indices, patches, maps, VIEW_INDUCED)
        return CheatingInstance(graph, 'rjoin', indices, patches, maps, radius,
                                {'kind': 'chromatic', 'chi': chi, 'n': n})

    @staticmethod
    def _assemble_grid(cover, indices, target):
        host, radius = cover.host, cover.radius
        w, h = int(cover.params['w']), int(cover.params['hh'])
        a, b = (w + 5) // 2, (h + 5) // 2
        copies = len(indices)
        width, height = target if target is not None else (copies * (a + 2 * radius), b + 2 * radius)
        band = width // copies
        if band < a + 2 * radius or height < b + 2 * radius:
            raise DoesNotFit(
                f"{copies} patches of {a + 2 * radius}x{b + 2 * radius} do not fit a {width}x{height} grid",
                band=band, needed=[a + 2 * radius, b + 2 * radius])

        reference, lattice_ids, lattice_w = GadgetService.kb_reference_patch(w, h, radius)
        graph = GraphService.grid_graph(width, height)

        patches, maps = [], []
        for j, x in enumerate(indices):
            element = cover.elements[x - 1]
            view, region = GadgetService.element_view(host, element, radius, VIEW_LOCAL)
            same, witness = GraphService.is_isomorphic(view, reference)
            if not same:
                raise CertificateFailed(f"Element {x} view is not a lattice patch")
            mapping = {}
            for local, host_id in enumerate(region):
                lattice = int(lattice_ids[witness[local]])
                gx, gy = lattice % lattice_w + j * band, lattice // lattice_w
                mapping[int(host_id)] = gy * width + gx
            maps.append(mapping)
            patches.append(np.array([mapping[int(u)] for u in element], dtype=np.int64))

        GadgetService._require_untouched(graph, host, cover, indices, patches, maps, VIEW_LOCAL)
        return CheatingInstance(graph, 'kb', indices, patches, maps, radius,
                                {'kind': 'grid', 'w': width, 'hh': height})

    @staticmethod
    def _require_untouched(graph, host, cover, indices, patches, maps, view_mode):
        """Each embedded patch must see, through its map, exactly what its gadget element sees"""
        for x, patch, mapping in zip(indices, patches, maps):
            mine, mine_ids = GadgetService.element_view(graph, patch, cover.radius, view_mode)
            theirs, their_ids = GadgetService.element_view(host, cover.elements[x - 1], cover.radius, view_mode)
            moved = np.array([mapping[int(u)] for u in their_ids], dtype=np.int64)
            same_nodes = np.array_equal(np.sort(moved), mine_ids)
            mine_edges = {tuple(e) for e in mine_ids[mine.edges()].tolist()}
            their_edges = {tuple(sorted(e)) for e in moved[theirs.edges()].tolist()}
            if not (same_nodes and mine_edges == their_edges):
                logger.error(f"Patch of element {x} does not see its gadget neighborhood")
                raise CertificateFailed(f"Embedded patch of element {x} differs from the gadget view")

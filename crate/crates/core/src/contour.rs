//! Contour extraction with a parent-child hierarchy.
//!
//! Foreground components (8-connected) produce outer contours; enclosed
//! background regions (4-connected, not touching the image border) produce
//! hole contours whose children are the components nested inside them.
//! Boundaries are traced with Moore neighbor tracing and canonicalized so
//! outer contours run counterclockwise (positive shoelace area in (x, y)
//! coordinates) and holes clockwise.

use crate::image::BinaryMask;

pub type ContourId = usize;

/// A closed boundary polygon in the contour forest.
///
/// `area` counts pixels: for an outer contour, everything inside or on the
/// border (nested holes and components included); for a hole contour, only
/// the pixels of the enclosed background region.
#[derive(Debug, Clone)]
pub struct Contour {
    pub points: Vec<(i32, i32)>,
    pub parent: Option<ContourId>,
    pub children: Vec<ContourId>,
    pub is_hole: bool,
    pub area: usize,
    /// Inclusive pixel bounding box (min_x, min_y, max_x, max_y).
    pub bbox: (u32, u32, u32, u32),
}

impl Contour {
    /// Twice the signed shoelace area; positive = counterclockwise.
    pub fn signed_area2(&self) -> i64 {
        signed_area2(&self.points)
    }
}

fn signed_area2(points: &[(i32, i32)]) -> i64 {
    let n = points.len();
    let mut acc = 0i64;
    for i in 0..n {
        let (x0, y0) = points[i];
        let (x1, y1) = points[(i + 1) % n];
        acc += x0 as i64 * y1 as i64 - x1 as i64 * y0 as i64;
    }
    acc
}

/// All contours found in one mask, in row-major discovery order.
#[derive(Debug, Clone)]
pub struct ContourForest {
    contours: Vec<Contour>,
    width: u32,
    fg_labels: Vec<i32>,
    /// Component id behind each outer contour (None for holes).
    comp_of_contour: Vec<Option<usize>>,
}

impl ContourForest {
    pub fn contours(&self) -> &[Contour] {
        &self.contours
    }

    pub fn get(&self, id: ContourId) -> &Contour {
        &self.contours[id]
    }

    pub fn len(&self) -> usize {
        self.contours.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contours.is_empty()
    }

    pub fn roots(&self) -> impl Iterator<Item = ContourId> + '_ {
        (0..self.contours.len()).filter(|&i| self.contours[i].parent.is_none())
    }

    /// Checks parent/child bidirectional consistency and absence of cycles.
    pub fn hierarchy_consistent(&self) -> bool {
        for (id, c) in self.contours.iter().enumerate() {
            if let Some(p) = c.parent {
                if p >= self.contours.len() || !self.contours[p].children.contains(&id) {
                    return false;
                }
            }
            for &ch in &c.children {
                if ch >= self.contours.len() || self.contours[ch].parent != Some(id) {
                    return false;
                }
            }
        }
        for mut id in 0..self.contours.len() {
            let mut steps = 0;
            while let Some(p) = self.contours[id].parent {
                id = p;
                steps += 1;
                if steps > self.contours.len() {
                    return false;
                }
            }
        }
        true
    }

    /// Filled mask of an outer contour over its bounding box: the component's
    /// pixels plus everything they enclose.
    pub fn filled_mask(&self, id: ContourId) -> BinaryMask {
        let contour = &self.contours[id];
        assert!(!contour.is_hole, "filled_mask is defined for outer contours");
        let comp = self.comp_of_contour[id].expect("outer contour has a component") as i32;
        let (min_x, min_y, max_x, max_y) = contour.bbox;
        let w = max_x - min_x + 1;
        let h = max_y - min_y + 1;
        let is_comp = |x: u32, y: u32| -> bool {
            self.fg_labels[(min_y + y) as usize * self.width as usize + (min_x + x) as usize]
                == comp
        };
        // Flood the exterior of a 1-pixel padded box; cells the flood cannot
        // reach are inside the contour.
        let pw = (w + 2) as usize;
        let ph = (h + 2) as usize;
        let mut outside = vec![false; pw * ph];
        let mut stack = vec![(0usize, 0usize)];
        outside[0] = true;
        while let Some((px, py)) = stack.pop() {
            for (dx, dy) in [(0i64, -1i64), (-1, 0), (1, 0), (0, 1)] {
                let nx = px as i64 + dx;
                let ny = py as i64 + dy;
                if nx < 0 || ny < 0 || nx >= pw as i64 || ny >= ph as i64 {
                    continue;
                }
                let (nx, ny) = (nx as usize, ny as usize);
                if outside[ny * pw + nx] {
                    continue;
                }
                let in_box = nx >= 1 && ny >= 1 && nx <= w as usize && ny <= h as usize;
                if in_box && is_comp(nx as u32 - 1, ny as u32 - 1) {
                    continue;
                }
                outside[ny * pw + nx] = true;
                stack.push((nx, ny));
            }
        }
        let mut mask = BinaryMask::empty(w, h);
        for y in 0..h {
            for x in 0..w {
                if !outside[(y + 1) as usize * pw + (x + 1) as usize] {
                    mask.set(x, y, true);
                }
            }
        }
        mask
    }
}

/// Extracts the contour forest of a mask.
///
/// Components or holes whose boundary trace yields fewer than 3 points
/// (1-2 pixel specks) are skipped; they cannot form a closed polygon.
pub fn find_contours(mask: &BinaryMask) -> ContourForest {
    let w = mask.width() as usize;
    let h = mask.height() as usize;

    // 8-connected foreground components in raster discovery order.
    let mut fg_labels = vec![-1i32; w * h];
    let mut fg_comps: Vec<CompInfo> = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if mask.get(x as u32, y as u32) && fg_labels[y * w + x] < 0 {
                let id = fg_comps.len() as i32;
                let info = flood_label(&mut fg_labels, w, h, (x, y), id, true, |px, py| {
                    mask.get(px as u32, py as u32)
                });
                fg_comps.push(info);
            }
        }
    }

    // 4-connected background regions; border-touching ones are the sea.
    // A region's bbox touches the border iff one of its pixels does.
    let mut bg_labels = vec![-1i32; w * h];
    let mut bg_comps: Vec<CompInfo> = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if !mask.get(x as u32, y as u32) && bg_labels[y * w + x] < 0 {
                let id = bg_comps.len() as i32;
                let info = flood_label(&mut bg_labels, w, h, (x, y), id, false, |px, py| {
                    !mask.get(px as u32, py as u32)
                });
                bg_comps.push(info);
            }
        }
    }
    let sea: Vec<bool> = bg_comps
        .iter()
        .map(|c| c.bbox.0 == 0 || c.bbox.1 == 0 || c.bbox.2 == w - 1 || c.bbox.3 == h - 1)
        .collect();

    // Trace boundaries in row-major order of each region's first pixel.
    let mut events: Vec<(usize, bool, usize)> = Vec::new();
    for (i, c) in fg_comps.iter().enumerate() {
        events.push((c.start.1 * w + c.start.0, false, i));
    }
    for (i, c) in bg_comps.iter().enumerate() {
        if !sea[i] {
            events.push((c.start.1 * w + c.start.0, true, i));
        }
    }
    events.sort_unstable();

    let mut contours: Vec<Contour> = Vec::new();
    let mut own_pixels: Vec<usize> = Vec::new();
    let mut comp_of_contour: Vec<Option<usize>> = Vec::new();
    let mut contour_of_comp: Vec<Option<ContourId>> = vec![None; fg_comps.len()];
    let mut contour_of_hole: Vec<Option<ContourId>> = vec![None; bg_comps.len()];

    for &(_, is_hole, region) in &events {
        let info = if is_hole { &bg_comps[region] } else { &fg_comps[region] };
        let labels = if is_hole { &bg_labels } else { &fg_labels };
        let mut points = trace_boundary(info.start, |x, y| {
            x >= 0
                && y >= 0
                && (x as usize) < w
                && (y as usize) < h
                && labels[y as usize * w + x as usize] == region as i32
        });
        if points.len() < 3 {
            continue;
        }
        let area2 = signed_area2(&points);
        if (!is_hole && area2 < 0) || (is_hole && area2 > 0) {
            points.reverse();
        }
        let id = contours.len();
        contours.push(Contour {
            points,
            parent: None,
            children: Vec::new(),
            is_hole,
            area: 0,
            bbox: (info.bbox.0 as u32, info.bbox.1 as u32, info.bbox.2 as u32, info.bbox.3 as u32),
        });
        own_pixels.push(info.pixels);
        if is_hole {
            contour_of_hole[region] = Some(id);
            comp_of_contour.push(None);
        } else {
            contour_of_comp[region] = Some(id);
            comp_of_contour.push(Some(region));
        }
    }

    // Parent links by enclosure: the pixel directly above a region's
    // raster-min pixel belongs to the enclosing region of opposite polarity.
    for (region, info) in fg_comps.iter().enumerate() {
        let Some(id) = contour_of_comp[region] else { continue };
        let (sx, sy) = info.start;
        if sy == 0 {
            continue; // touches the top border, necessarily a root
        }
        let above = bg_labels[(sy - 1) * w + sx];
        debug_assert!(above >= 0, "pixel above a component's top pixel is background");
        if !sea[above as usize] {
            if let Some(pid) = contour_of_hole[above as usize] {
                contours[id].parent = Some(pid);
            }
        }
    }
    for (region, info) in bg_comps.iter().enumerate() {
        let Some(id) = contour_of_hole[region] else { continue };
        let (sx, sy) = info.start;
        debug_assert!(sy > 0, "non-sea background cannot touch the top border");
        let above = fg_labels[(sy - 1) * w + sx];
        debug_assert!(above >= 0, "pixel above a hole's top pixel is foreground");
        if let Some(pid) = contour_of_comp[above as usize] {
            contours[id].parent = Some(pid);
        }
    }
    for id in 0..contours.len() {
        if let Some(p) = contours[id].parent {
            contours[p].children.push(id);
        }
    }

    // fill[id] = own pixels plus everything nested below; the exposed area is
    // fill for outer contours and just the region pixels for holes.
    let mut fill = vec![0usize; contours.len()];
    let order = depth_order(&contours);
    for &id in order.iter().rev() {
        fill[id] = own_pixels[id] + contours[id].children.iter().map(|&c| fill[c]).sum::<usize>();
    }
    for (id, c) in contours.iter_mut().enumerate() {
        c.area = if c.is_hole { own_pixels[id] } else { fill[id] };
    }

    ContourForest { contours, width: w as u32, fg_labels, comp_of_contour }
}

/// Contour ids ordered so parents precede children.
fn depth_order(contours: &[Contour]) -> Vec<ContourId> {
    let mut order: Vec<ContourId> = (0..contours.len()).collect();
    let depth = |mut id: ContourId| {
        let mut d = 0usize;
        while let Some(p) = contours[id].parent {
            id = p;
            d += 1;
        }
        d
    };
    order.sort_by_key(|&id| (depth(id), id));
    order
}

struct CompInfo {
    start: (usize, usize),
    pixels: usize,
    bbox: (usize, usize, usize, usize),
}

fn flood_label(
    labels: &mut [i32],
    w: usize,
    h: usize,
    start: (usize, usize),
    id: i32,
    eight_connected: bool,
    member: impl Fn(usize, usize) -> bool,
) -> CompInfo {
    const N8: [(i64, i64); 8] =
        [(-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)];
    const N4: [(i64, i64); 4] = [(0, -1), (-1, 0), (1, 0), (0, 1)];
    let neighbors: &[(i64, i64)] = if eight_connected { &N8 } else { &N4 };

    let mut stack = vec![start];
    labels[start.1 * w + start.0] = id;
    let mut pixels = 0usize;
    let mut bbox = (start.0, start.1, start.0, start.1);
    while let Some((x, y)) = stack.pop() {
        pixels += 1;
        bbox.0 = bbox.0.min(x);
        bbox.1 = bbox.1.min(y);
        bbox.2 = bbox.2.max(x);
        bbox.3 = bbox.3.max(y);
        for &(dx, dy) in neighbors {
            let nx = x as i64 + dx;
            let ny = y as i64 + dy;
            if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                continue;
            }
            let (nx, ny) = (nx as usize, ny as usize);
            if labels[ny * w + nx] < 0 && member(nx, ny) {
                labels[ny * w + nx] = id;
                stack.push((nx, ny));
            }
        }
    }
    CompInfo { start, pixels, bbox }
}

/// Clockwise Moore neighborhood offsets in screen coordinates (y down),
/// starting west.
const MOORE: [(i32, i32); 8] =
    [(-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1)];

/// Moore neighbor tracing with Jacob's stopping criterion. `start` must be
/// the region's raster-min pixel so that entering from the west is valid.
fn trace_boundary(start: (usize, usize), in_region: impl Fn(i32, i32) -> bool) -> Vec<(i32, i32)> {
    let s = (start.0 as i32, start.1 as i32);
    debug_assert!(in_region(s.0, s.1));
    let mut points = vec![s];
    let mut current = s;
    let mut back = 0usize; // came from the west
    let first_entry = (s, back);
    let mut start_visits = 0usize;
    loop {
        let mut found = None;
        for k in 1..=8 {
            let dir = (back + k) % 8;
            let (dx, dy) = MOORE[dir];
            let np = (current.0 + dx, current.1 + dy);
            if in_region(np.0, np.1) {
                found = Some((np, dir));
                break;
            }
        }
        let Some((next, dir)) = found else {
            return points; // isolated pixel
        };
        // New backtrack: direction from `next` to the last empty neighbor
        // examined while scanning from `current`.
        let prev_dir = (dir + 7) % 8;
        let (pdx, pdy) = MOORE[prev_dir];
        let prev_empty = (current.0 + pdx, current.1 + pdy);
        let ndx = prev_empty.0 - next.0;
        let ndy = prev_empty.1 - next.1;
        let nb = MOORE
            .iter()
            .position(|&(mx, my)| (mx, my) == (ndx, ndy))
            .expect("previous empty neighbor is Moore-adjacent to next");
        current = next;
        back = nb;
        if (current, back) == first_entry {
            break;
        }
        if current == s {
            start_visits += 1;
            if start_visits > 3 {
                break; // pathological region; trace is already closed enough
            }
        }
        points.push(current);
    }
    points
}

use rand::Rng;

use super::preprocess::{forward_walks, return_along_breadcrumbs};
use super::{Breadcrumbs, WalkError, WalkResult, WalkStatus};
use crate::graph::NodeId;
use crate::sim::{Network, Phase, SimError, Token, TokenKind};

/// Baseline walk: a token takes `length` uniform neighbor steps, then the
/// destination sends its identity back to `source` along the same path.
///
/// On an idle network this costs exactly `2 * length` rounds and messages.
pub fn naive_walk<R: Rng + ?Sized>(
    net: &mut Network<'_>,
    source: NodeId,
    length: u32,
    rng: &mut R,
) -> Result<WalkResult, WalkError> {
    if length == 0 {
        return Err(WalkError::InvalidParameter("walk length must be at least 1".into()));
    }
    if !net.is_idle() {
        return Err(SimError::Busy.into());
    }
    let before = net.cost();
    let previous_phase = net.phase();
    net.set_phase(Phase::NaiveBaseline);

    let mut crumbs = Breadcrumbs::new([length]);
    let start = Token::new(TokenKind::NaiveStep, 0, source, length);
    let arrivals = forward_walks(net, [(source, start)], &mut crumbs, rng)?;
    let returned = return_along_breadcrumbs(net, &arrivals, &crumbs, TokenKind::NaiveReturn)?;
    net.set_phase(previous_phase);

    let (back_at, _, destination) = returned[0];
    debug_assert_eq!(back_at, source);
    Ok(WalkResult {
        source,
        length,
        destination: Some(destination),
        connectors: vec![source],
        stitched: Vec::new(),
        tail_steps: length,
        cost: net.cost() - before,
        status: WalkStatus::Ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, Family, GeneratorSpec, Graph};
    use crate::rng::{stream, Purpose};
    use crate::sim::Capacity;

    #[test]
    fn cost_is_twice_the_length() {
        let g = generate(&GeneratorSpec::new(Family::GnpExpander, 30, 1)).unwrap().graph;
        let mut net = Network::new(&g, Capacity::Limited(1)).unwrap();
        let mut rng = stream(1, Purpose::Walk, &[]);
        let r = naive_walk(&mut net, 0, 5, &mut rng).unwrap();
        assert_eq!(r.cost.total_rounds(), 10);
        assert_eq!(r.cost.total_messages(), 10);
        assert_eq!(r.cost.messages.get(Phase::NaiveBaseline), 10);
    }

    #[test]
    fn path_center_returns_home_in_two_steps() {
        let g = Graph::path(3);
        let mut net = Network::new(&g, Capacity::Limited(1)).unwrap();
        let mut rng = stream(2, Purpose::Walk, &[]);
        for _ in 0..50 {
            assert_eq!(naive_walk(&mut net, 1, 2, &mut rng).unwrap().destination, Some(1));
        }
    }

    #[test]
    fn four_cycle_two_steps_splits_evenly() {
        let g = Graph::cycle(4);
        let mut net = Network::new(&g, Capacity::Limited(1)).unwrap();
        let mut rng = stream(3, Purpose::Walk, &[]);
        let trials = 20_000;
        let mut home = 0;
        for _ in 0..trials {
            match naive_walk(&mut net, 0, 2, &mut rng).unwrap().destination {
                Some(0) => home += 1,
                Some(2) => {}
                other => panic!("unreachable destination {other:?}"),
            }
        }
        let frac = home as f64 / trials as f64;
        assert!((frac - 0.5).abs() < 0.015, "fraction at start {frac}");
    }

    #[test]
    fn zero_length_rejected() {
        let g = Graph::path(3);
        let mut net = Network::new(&g, Capacity::Limited(1)).unwrap();
        assert!(naive_walk(&mut net, 0, 0, &mut stream(0, Purpose::Walk, &[])).is_err());
    }
}

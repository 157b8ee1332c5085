use icmn_core::meeting::{estimate_beta, generate_schedule, total_meeting_rate, MeetingSchedule};
use icmn_core::params::{pair_count, pairs, NetworkParams};
use icmn_core::stats::ks_exponential;

fn reference_schedule() -> MeetingSchedule {
    let params = NetworkParams::poisson(20, 6.96e-4).unwrap();
    generate_schedule(&params, 1e7, 11).unwrap()
}

#[test]
fn event_count_coin_and_pair_gaps() {
    let s = reference_schedule();
    let expected = total_meeting_rate(20, 6.96e-4) * 1e7;
    let count = s.len() as f64;
    assert!(
        (count - expected).abs() <= 0.005 * expected,
        "{count} vs {expected}"
    );

    // Transmitter coin: the lower-indexed node transmits half the time.
    let lower = s
        .events()
        .iter()
        .filter(|e| e.transmitter() == e.pair().0)
        .count() as f64;
    assert!((lower / count - 0.5).abs() <= 0.01, "{}", lower / count);

    // Every pair's gaps are exponential with rate beta. At the 1% level a few
    // of the 190 pairs are expected to be rejected by chance.
    let rejected = pairs(20)
        .filter(|&(i, j)| !ks_exponential(&s.inter_meeting_times(i, j), 6.96e-4).passes(0.01))
        .count();
    assert!(
        rejected <= 8,
        "{rejected} of {} pairs rejected",
        pair_count(20)
    );

    let est = estimate_beta(&s);
    assert!((est.beta - 6.96e-4).abs() <= 0.005 * 6.96e-4);
    assert!(!est.low_sample);
}

#[test]
fn schedule_text_round_trips() {
    let params = NetworkParams::poisson(6, 0.01).unwrap();
    let s = generate_schedule(&params, 5_000.0, 3).unwrap();
    let text = s.to_text();
    let back = MeetingSchedule::read_from(text.as_bytes()).unwrap();
    assert_eq!(back.events(), s.events());
    assert_eq!(back.to_text(), text);
}

#[test]
fn seeds_are_independent_and_reproducible() {
    let params = NetworkParams::poisson(10, 0.002).unwrap();
    let a = generate_schedule(&params, 1e5, 1).unwrap();
    let b = generate_schedule(&params, 1e5, 1).unwrap();
    let c = generate_schedule(&params, 1e5, 2).unwrap();
    assert_eq!(a.to_text(), b.to_text());
    assert_ne!(a.to_text(), c.to_text());
}

#[test]
fn malformed_schedules_are_rejected() {
    let bad = [
        "",
        "icmn-meetings v1 n=3 horizon=10\n",
        "icmn-meetings v1 n=3 horizon=10 seed=1\n1.0 0 0 0\n",
        "icmn-meetings v1 n=3 horizon=10 seed=1\n1.0 0 1 2\n",
        "icmn-meetings v1 n=3 horizon=10 seed=1\n2.0 0 1 0\n1.0 0 2 0\n",
        "icmn-meetings v1 n=3 horizon=10 seed=1\n11.0 0 1 0\n",
    ];
    for text in bad {
        assert!(
            MeetingSchedule::read_from(text.as_bytes()).is_err(),
            "accepted {text:?}"
        );
    }
}

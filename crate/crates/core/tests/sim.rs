mod common;

use common::*;
use hopcrack::afh::*;
use hopcrack::sim::*;
use proptest::prelude::*;

fn params(bits: u64, h_inc: u8, luc: u8) -> ConnectionParams {
    ConnectionParams {
        access_address: 0x1234abcd,
        c_int_us: 50_000,
        h_inc,
        c_map: ChannelMap::from_bits(bits).unwrap(),
        luc,
    }
}

fn churning(seed: u64, p_loss: f64) -> VictimConnection {
    let sched = MapUpdateSchedule::periodic(
        2_000_000,
        MapGenerator::RemoveRestore {
            max_remove: 5,
            min_used: 10,
        },
    );
    VictimConnection::new(
        params(0x0f_ffff_f0f0, 9, 3),
        sched,
        LossModel::uniform(p_loss).unwrap(),
        seed,
    )
    .unwrap()
}

#[test]
fn events_follow_the_reference_across_map_updates() {
    let mut conn = churning(11, 0.0);
    let records = conn.advance(60_000_000);
    assert!(conn.update_events().count() >= 25);
    let mut luc = 3u32;
    for r in &records {
        let used = used_from_bits(conn.map_for_event(r.index).bits());
        let expect = naive_channels(&used, 9, luc, 1)[0];
        luc = (luc + 9) % 37;
        assert_eq!(r.unmapped as u32, luc);
        assert_eq!(r.channel.get() as u32, expect, "event {}", r.index);
    }
}

#[test]
fn anchors_are_evenly_spaced() {
    let mut conn = churning(2, 0.2).with_first_anchor(12_345);
    let records = conn.advance(10_000_000);
    assert_eq!(records[0].anchor_us, 12_345);
    for w in records.windows(2) {
        assert_eq!(w[1].anchor_us - w[0].anchor_us, 50_000);
        assert_eq!(w[1].index, w[0].index + 1);
    }
    assert!(conn.advance(conn.now()).is_empty());
}

#[test]
fn update_announced_one_event_ahead() {
    let mut conn = churning(5, 0.0);
    conn.advance(30_000_000);
    for i in conn.update_events().collect::<Vec<_>>() {
        let announced = conn
            .record(i - 1)
            .unwrap()
            .map_update
            .expect("announcement");
        assert_eq!(announced, conn.map_for_event(i));
        assert_ne!(conn.map_for_event(i - 1), conn.map_for_event(i));
        assert!(announced.popcount() >= 10);
    }
}

#[test]
fn identical_inputs_give_identical_logs() {
    let run = || {
        let mut radio = SimRadio::new(churning(77, 0.3));
        let mut ch = 0u8;
        while radio.now() < 20_000_000 {
            radio.tune(ch).unwrap();
            radio.observe(700_000);
            ch = (ch + 5) % 37;
        }
        (
            format_event_log(radio.connection().records()),
            format_observation_log(radio.log()),
        )
    };
    assert_eq!(run(), run());
}

#[test]
fn observations_match_delivered_events() {
    let mut radio = SimRadio::new(churning(3, 0.4));
    let mut ch = 0u8;
    while radio.now() < 30_000_000 {
        radio.tune(ch).unwrap();
        radio.observe(330_000);
        ch = (ch + 1) % 37;
    }
    let conn = radio.connection();
    assert!(!radio.log().is_empty());
    for o in radio.log() {
        let r = conn.record(conn.event_at_or_after(o.anchor_us())).unwrap();
        assert_eq!(r.anchor_us, o.anchor_us());
        assert_eq!(r.channel, o.channel);
        match o.role {
            Role::Master => assert!(!r.master_lost),
            Role::Slave => {
                assert!(r.master_lost && !r.slave_lost);
                assert_eq!(o.time_us, r.anchor_us + T_IFS_US);
            }
        }
    }
}

#[test]
fn log_formats() {
    let mut radio = SimRadio::new(
        VictimConnection::new(
            params(ChannelMap::FULL.bits(), 7, 0),
            MapUpdateSchedule::none(),
            LossModel::lossless(),
            1,
        )
        .unwrap(),
    );
    radio.tune(7).unwrap();
    radio.observe(37 * 50_000);
    assert_eq!(
        format_observation_log(radio.log()),
        "50000,7,1234abcd,master\n"
    );
    let events = format_event_log(&radio.connection().records()[..2]);
    assert_eq!(events, "50000,7,0,0\n100000,14,0,0\n");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn one_period_on_a_channel_hears_each_appearance(
        bits in (0u64..(1 << 37)).prop_filter("two used", |b| b.count_ones() >= 2),
        h in 5u8..=16,
        luc in 0u8..37,
        ch in 0u8..37,
    ) {
        let p = params(bits, h, luc);
        let expect = naive_channels(&used_from_bits(bits), h as u32, luc as u32, 37)
            .iter()
            .filter(|&&c| c == ch as u32)
            .count();
        let conn = VictimConnection::new(p, MapUpdateSchedule::none(), LossModel::lossless(), 9).unwrap();
        let mut radio = SimRadio::new(conn);
        radio.tune(ch).unwrap();
        prop_assert_eq!(radio.observe(37 * 50_000).len(), expect);
    }
}

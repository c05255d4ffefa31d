use std::ffi::{CStr, CString};
use std::ptr;

use rieffel_deform_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(rd_last_error_message()) }.to_string_lossy().into_owned()
}

fn element(n: usize, terms: &[([i64; 2], f64, f64)]) -> *mut RdElement {
    let mut el = ptr::null_mut();
    unsafe {
        assert_eq!(rd_element_new(n, &mut el), RdStatus::Ok);
        for (k, re, im) in terms {
            assert_eq!(rd_element_add_term(el, k.as_ptr(), 2, *re, *im), RdStatus::Ok);
        }
    }
    el
}

fn coeff(el: *const RdElement, k: [i64; 2]) -> (f64, f64) {
    let (mut re, mut im) = (f64::NAN, f64::NAN);
    assert_eq!(unsafe { rd_element_coeff(el, k.as_ptr(), 2, &mut re, &mut im) }, RdStatus::Ok);
    (re, im)
}

#[test]
fn generators_commute_up_to_phase() {
    unsafe {
        let mut data = ptr::null_mut();
        assert_eq!(rd_data_standard(1, 1.0, &mut data), RdStatus::Ok);
        let u = element(1, &[([1, 0], 1.0, 0.0)]);
        let v = element(1, &[([0, 1], 1.0, 0.0)]);
        let (mut uv, mut vu) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(rd_star_product(data, u, v, &mut uv), RdStatus::Ok);
        assert_eq!(rd_star_product(data, v, u, &mut vu), RdStatus::Ok);
        let (a, b) = (coeff(uv, [1, 1]), coeff(vu, [1, 1]));
        assert!((a.0 - b.0).abs() < 1e-15 && (a.1 + b.1).abs() < 1e-15);
        assert!((a.1 + 0.5f64.sin()).abs() < 1e-15);
        for p in [u, v, uv, vu] {
            rd_element_free(p);
        }
        rd_data_free(data);
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    unsafe {
        let mut data = ptr::null_mut();
        assert_eq!(rd_data_standard(1, -1.0, &mut data), RdStatus::InvalidHbar);
        assert!(last_error().contains("hbar"));
        assert!(data.is_null());

        let theta = [0.0, 1.0, -1.0, 0.0];
        let g = [2.0, 0.0, 0.0, 1.0];
        assert_eq!(rd_data_new(1, theta.as_ptr(), g.as_ptr(), 0.5, &mut data), RdStatus::Incompatible);
        let g = [1.0, 0.0, 0.0, -1.0];
        assert_eq!(rd_data_new(1, theta.as_ptr(), g.as_ptr(), 0.5, &mut data), RdStatus::NotPositiveDefinite);
        assert_eq!(rd_data_new(1, ptr::null(), g.as_ptr(), 0.5, &mut data), RdStatus::NullPointer);

        let el = element(1, &[([3, 0], 1.0, 0.0)]);
        assert_eq!(rd_data_standard(1, 0.0, &mut data), RdStatus::Ok);
        let (mut lo, mut hi) = (0.0, 0.0);
        assert_eq!(rd_norm_bracket(data, el, 2, &mut lo, &mut hi), RdStatus::CutoffTooSmall);
        assert_eq!(rd_element_add_term(el, [1, 2, 3].as_ptr(), 3, 1.0, 0.0), RdStatus::DimensionMismatch);
        let mut c = 0.0;
        assert_eq!(rd_smoothing_norm_constant(data, &mut c), RdStatus::InvalidHbar);
        rd_element_free(el);
        rd_data_free(data);
        rd_data_free(ptr::null_mut());
    }
}

#[test]
fn json_round_trip() {
    unsafe {
        let text = CString::new(r#"{"dim":1,"terms":[{"k":[1,-2],"re":0.5,"im":-1.0}]}"#).unwrap();
        let mut el = ptr::null_mut();
        assert_eq!(rd_element_from_json(text.as_ptr(), &mut el), RdStatus::Ok);
        let mut len = 0;
        assert_eq!(rd_element_len(el, &mut len), RdStatus::Ok);
        assert_eq!(len, 1);
        assert_eq!(coeff(el, [1, -2]), (0.5, -1.0));
        let mut out = ptr::null_mut();
        assert_eq!(rd_element_to_json(el, &mut out), RdStatus::Ok);
        assert_eq!(CStr::from_ptr(out).to_str().unwrap(), text.to_str().unwrap());
        rd_string_free(out);
        rd_element_free(el);

        let bad = CString::new("{").unwrap();
        assert_eq!(rd_element_from_json(bad.as_ptr(), &mut el), RdStatus::InvalidArgument);
    }
}

#[test]
fn states_and_norms() {
    unsafe {
        let mut data = ptr::null_mut();
        assert_eq!(rd_data_standard(1, 2.0, &mut data), RdStatus::Ok);
        let a = element(1, &[([0, 0], 1.0, 0.0), ([1, 1], 0.5, 0.0)]);
        let mut haar = ptr::null_mut();
        assert_eq!(rd_state_haar(&mut haar), RdStatus::Ok);
        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(rd_deformed_evaluate(haar, data, a, &mut re, &mut im), RdStatus::Ok);
        assert_eq!((re, im), (1.0, 0.0));

        let x = [0.0, 0.0];
        let mut point = ptr::null_mut();
        assert_eq!(rd_state_point(x.as_ptr(), 2, &mut point), RdStatus::Ok);
        assert_eq!(rd_deformed_evaluate(point, data, a, &mut re, &mut im), RdStatus::Ok);
        assert!((re - (1.0 + 0.5 * (-1.0f64).exp())).abs() < 1e-15);

        let (mut lo, mut hi) = (0.0, 0.0);
        assert_eq!(rd_norm_bracket(data, a, 4, &mut lo, &mut hi), RdStatus::Ok);
        assert!(lo <= hi && hi == 1.5 && lo > 0.0);
        let mut c = 0.0;
        assert_eq!(rd_smoothing_norm_constant(data, &mut c), RdStatus::Ok);
        assert!((c - 1.0).abs() < 1e-14);

        let mut shifted = ptr::null_mut();
        assert_eq!(rd_data_with_hbar(data, 0.0, &mut shifted), RdStatus::Ok);
        let mut sa = ptr::null_mut();
        assert_eq!(rd_smooth(shifted, a, &mut sa), RdStatus::Ok);
        assert_eq!(coeff(sa, [1, 1]), (0.5, 0.0));

        rd_element_free(sa);
        rd_element_free(a);
        rd_state_free(haar);
        rd_state_free(point);
        rd_data_free(shifted);
        rd_data_free(data);
    }
}

#[test]
fn static_strings() {
    let v = unsafe { CStr::from_ptr(rd_version()) }.to_str().unwrap();
    assert_eq!(v, rieffel_deform::VERSION);
    let t = unsafe { CStr::from_ptr(rd_twist_convention()) }.to_str().unwrap();
    assert_eq!(t, rieffel_deform::product::TWIST_CONVENTION);
}

//! URL-derived metadata: registrable domains, titles and dates from paths,
//! and brand-token removal for titles.

use std::sync::OnceLock;

use chrono::{NaiveDate, NaiveDateTime};
use regex::Regex;
use url::Url;

use super::IngestError;

/// Registrable domain (`www.bbc.co.uk` -> `bbc.co.uk`), lowercased. Accepts
/// a full URL or a bare host.
pub fn registrable_domain(url_or_host: &str) -> Option<String> {
    let s = url_or_host.trim();
    if s.is_empty() {
        return None;
    }
    let host = match Url::parse(s) {
        Ok(u) if u.host_str().is_some() => u.host_str().unwrap().to_string(),
        _ => {
            let bare = s.trim_start_matches("//");
            Url::parse(&format!("http://{bare}")).ok()?.host_str()?.to_string()
        }
    };
    let host = host.trim_end_matches('.').to_ascii_lowercase();
    if host.parse::<std::net::IpAddr>().is_ok() || !host.contains('.') {
        return None;
    }
    psl::domain_str(&host).map(str::to_string)
}

/// First label of the registrable domain (`bbc.co.uk` -> `bbc`).
pub fn domain_label(domain: &str) -> &str {
    domain.split('.').next().unwrap_or(domain)
}

fn slug_is_usable(seg: &str) -> bool {
    !seg.is_empty() && !seg.chars().all(|c| c.is_ascii_digit()) && seg.chars().any(|c| c.is_alphabetic())
}

/// Title from the last meaningful path segment of `url`.
///
/// Numeric segments, file extensions and query/fragment are ignored; `-` and
/// `_` become spaces; brand tokens (`politifact`, the site's own name) are
/// removed.
pub fn title_from_url(url: &str) -> Result<String, IngestError> {
    let parsed = Url::parse(url.trim()).map_err(|_| IngestError::Url(url.to_string()))?;
    let seg = parsed
        .path_segments()
        .into_iter()
        .flatten()
        .rev()
        .map(strip_extension)
        .find(|s| slug_is_usable(s))
        .ok_or_else(|| IngestError::NoSlug(url.to_string()))?;
    let decoded = percent_decode(seg);
    let spaced: String = decoded.chars().map(|c| if c == '-' || c == '_' || c == '+' { ' ' } else { c }).collect();
    let domain = registrable_domain(url).unwrap_or_default();
    let title = clean_title(&spaced, &domain);
    if title.is_empty() {
        return Err(IngestError::NoSlug(url.to_string()));
    }
    Ok(title.to_lowercase())
}

fn strip_extension(seg: &str) -> &str {
    static EXT: OnceLock<Regex> = OnceLock::new();
    let re = EXT.get_or_init(|| Regex::new(r"(?i)\.(html?|php|aspx?|jsp|cms|shtml)$").unwrap());
    match re.find(seg) {
        Some(m) => &seg[..m.start()],
        None => seg,
    }
}

fn percent_decode(s: &str) -> String {
    url::form_urlencoded::parse(format!("x={s}").as_bytes()).next().map(|(_, v)| v.into_owned()).unwrap_or_else(|| s.to_string())
}

/// Removes `politifact` and the article's own domain name from a title.
/// The full registrable domain and the `politifact` string are removed
/// wherever they occur; the bare site name only as a whole word.
pub fn clean_title(title: &str, domain: &str) -> String {
    let mut out = remove_ci(title, "politifact");
    if !domain.is_empty() {
        out = remove_ci(&out, domain);
        let label = domain_label(domain);
        if label.len() > 1 {
            let re = Regex::new(&format!(r"(?i)\b{}\b", regex::escape(label))).expect("escaped");
            out = re.replace_all(&out, " ").into_owned();
        }
    }
    // leftovers like "| " or " - " at the ends
    let collapsed = crate::html::collapse_ws(&out);
    collapsed.trim_matches(|c: char| c.is_whitespace() || "-|:,;".contains(c)).to_string()
}

fn remove_ci(haystack: &str, needle: &str) -> String {
    let re = Regex::new(&format!("(?i){}", regex::escape(needle))).expect("escaped");
    let mut out = haystack.to_string();
    // removal can create a new match ("polipolitifacttifact")
    loop {
        let next = re.replace_all(&out, " ").into_owned();
        if next == out {
            return out;
        }
        out = next;
    }
}

const MONTHS: [&str; 12] = ["jan", "feb", "mar", "apr", "may", "jun", "jul", "aug", "sep", "oct", "nov", "dec"];

fn month_number(s: &str) -> Option<u32> {
    if let Ok(n) = s.parse::<u32>() {
        return (1..=12).contains(&n).then_some(n);
    }
    let lower = s.to_ascii_lowercase();
    MONTHS.iter().position(|m| lower.starts_with(m)).map(|i| i as u32 + 1)
}

/// Date embedded in a URL path: `/2020/jan/15/`, `/2019/05/07/`, or
/// month-only `/2019/05/` (first of the month).
pub fn date_from_url(url: &str) -> Option<NaiveDate> {
    static RE: OnceLock<Regex> = OnceLock::new();
    let re = RE.get_or_init(|| Regex::new(r"(?i)/((?:19|20)\d\d)/(\d{1,2}|[a-z]{3,9})(?:/(\d{1,2}))?(?:/|$)").unwrap());
    let path = Url::parse(url).map(|u| u.path().to_string()).unwrap_or_else(|_| url.to_string());
    for c in re.captures_iter(&path) {
        let year: i32 = c[1].parse().ok()?;
        let Some(month) = month_number(&c[2]) else { continue };
        let day = c.get(3).and_then(|d| d.as_str().parse().ok()).unwrap_or(1);
        if let Some(d) = NaiveDate::from_ymd_opt(year, month, day) {
            return Some(d);
        }
    }
    None
}

/// Parses the date formats seen in the upstream datasets, including unix
/// timestamps.
pub fn parse_date(raw: &str) -> Option<NaiveDate> {
    let s = raw.trim();
    if s.is_empty() {
        return None;
    }
    if let Ok(dt) = chrono::DateTime::parse_from_rfc3339(s) {
        return Some(dt.date_naive());
    }
    if let Ok(dt) = chrono::DateTime::parse_from_rfc2822(s) {
        return Some(dt.date_naive());
    }
    for fmt in ["%Y-%m-%d %H:%M:%S%.f", "%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f%#z", "%Y-%m-%dT%H:%M:%S%.f%#z"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(dt.date());
        }
        if let Ok(dt) = chrono::DateTime::parse_from_str(s, fmt) {
            return Some(dt.date_naive());
        }
    }
    for fmt in ["%Y-%m-%d", "%Y/%m/%d", "%m/%d/%Y", "%d.%m.%Y", "%B %d, %Y", "%b %d, %Y", "%d %B %Y", "%d %b %Y", "%B %e, %Y"] {
        if let Ok(d) = NaiveDate::parse_from_str(s, fmt) {
            return Some(d);
        }
    }
    if let Ok(ts) = s.parse::<i64>() {
        // seconds, or milliseconds for 13-digit values
        let secs = if s.len() >= 13 { ts / 1000 } else { ts };
        return chrono::DateTime::from_timestamp(secs, 0).map(|d| d.date_naive());
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registrable_domains() {
        assert_eq!(registrable_domain("https://www.bbc.co.uk/news/x").as_deref(), Some("bbc.co.uk"));
        assert_eq!(registrable_domain("edition.cnn.com").as_deref(), Some("cnn.com"));
        assert_eq!(registrable_domain("HTTP://News.Example.ORG").as_deref(), Some("example.org"));
        assert_eq!(registrable_domain(""), None);
        assert_eq!(registrable_domain("localhost"), None);
    }

    #[test]
    fn politifact_slug() {
        let t = title_from_url("https://www.politifact.com/factchecks/2021/mar/02/joe-biden/biden-said-x/").unwrap();
        assert_eq!(t, "biden said x");
    }

    #[test]
    fn dated_slug_without_trailing_slash() {
        assert_eq!(title_from_url("https://news.site/2019/05/fake-moon-landing-photos").unwrap(), "fake moon landing photos");
    }

    #[test]
    fn empty_path_is_error() {
        assert!(matches!(title_from_url("https://example.com/"), Err(IngestError::NoSlug(_))));
        assert!(matches!(title_from_url("not a url"), Err(IngestError::Url(_))));
    }

    #[test]
    fn extensions_queries_and_brand_tokens() {
        assert_eq!(title_from_url("https://www.example.com/2020/01/02/storm-hits-coast.html?utm_source=x").unwrap(), "storm hits coast");
        assert_eq!(title_from_url("https://www.politifact.com/article/2019/politifact-checks-the-debate/").unwrap(), "checks the debate");
        assert_eq!(title_from_url("https://reuters.com/world/reuters-exclusive-deal/12345").unwrap(), "exclusive deal");
    }

    #[test]
    fn title_cleaning() {
        assert_eq!(clean_title("PolitiFact: Claim about taxes", "politifact.com"), "Claim about taxes");
        assert_eq!(clean_title("Storm hits coast | BBC.co.uk", "bbc.co.uk"), "Storm hits coast");
        assert_eq!(clean_title("Storm - BBC News", "bbc.co.uk"), "Storm - News");
        // label removed only as a word
        assert_eq!(clean_title("The Sunday Times", "times.co.uk"), "The Sunday");
        assert_eq!(clean_title("Timesheet rules", "times.co.uk"), "Timesheet rules");
    }

    #[test]
    fn url_dates() {
        let d = |y, m, dd| NaiveDate::from_ymd_opt(y, m, dd).unwrap();
        assert_eq!(date_from_url("https://www.politifact.com/factchecks/2020/jan/15/some-claim-slug/"), Some(d(2020, 1, 15)));
        assert_eq!(date_from_url("https://news.site/2019/05/fake-moon-landing-photos"), Some(d(2019, 5, 1)));
        assert_eq!(date_from_url("https://x.com/2018/11/30/a"), Some(d(2018, 11, 30)));
        assert_eq!(date_from_url("https://x.com/a/b"), None);
    }

    #[test]
    fn date_formats() {
        let d = NaiveDate::from_ymd_opt(2020, 3, 7).unwrap();
        for s in ["2020-03-07", "2020-03-07 12:00:01", "2020-03-07T12:00:01Z", "03/07/2020", "March 7, 2020", "Mar 7, 2020", "7 March 2020", "2020-03-07T10:00:00+02:00", "1583582401"] {
            assert_eq!(parse_date(s), Some(d), "{s}");
        }
        assert_eq!(parse_date("yesterday"), None);
    }
}

import json
import logging
import logging.config

from harvestkit.log_format import LogFormatter, StructuredLogger, create_logger
from harvestkit.logging_config import (
    ColoredFormatter,
    JSONFormatter,
    RunContextFilter,
    clear_run_context,
    configure_logging,
    get_run_context,
    log_exception,
    set_run_context,
)


def make_record(message='hello', level=logging.INFO):
    return logging.LogRecord(
        'harvestkit.test', level, __file__, 10, message, None, None
    )


class TestConfigureLogging:
    def test_console_only(self):
        config = configure_logging()
        assert config['loggers']['harvestkit']['handlers'] == ['console']
        assert config['loggers']['harvestkit']['level'] == 'INFO'
        assert config['handlers']['console']['stream'] == 'ext://sys.stderr'
        assert config['handlers']['console']['formatter'] == 'simple'

    def test_debug_and_json(self):
        assert configure_logging(debug=True)['handlers']['console']['formatter'] == (
            'colored'
        )
        config = configure_logging(json_output=True, level='WARNING')
        assert config['handlers']['console']['formatter'] == 'json'
        assert config['loggers']['harvestkit']['level'] == 'WARNING'

    def test_file_handlers(self, tmp_path):
        config = configure_logging(log_dir=str(tmp_path / 'logs'))
        assert (tmp_path / 'logs').is_dir()
        assert config['loggers']['harvestkit']['handlers'] == [
            'console', 'file_app', 'file_error',
        ]
        logging.config.dictConfig(config)
        logging.getLogger('harvestkit.test').error('boom')
        for handler in logging.getLogger('harvestkit').handlers:
            handler.flush()
        assert 'boom' in (tmp_path / 'logs' / 'error.log').read_text(encoding='utf-8')

    def test_extra_loggers(self):
        config = configure_logging(extra_loggers={'custom': {'level': 'ERROR'}})
        assert config['loggers']['custom'] == {'level': 'ERROR'}


class TestFormatters:
    def test_json_formatter_includes_context(self):
        record = make_record()
        set_run_context(run_id='abc', point=7)
        RunContextFilter().filter(record)
        data = json.loads(JSONFormatter(system_name='TEST').format(record))
        assert data['message'] == 'hello'
        assert data['system'] == 'TEST'
        assert data['run_id'] == 'abc'
        assert data['point'] == 7

    def test_context_defaults(self):
        clear_run_context()
        record = make_record()
        RunContextFilter().filter(record)
        assert record.run_id == '-'
        assert 'run_id' not in json.loads(JSONFormatter().format(record))

    def test_colored_formatter(self):
        formatter = ColoredFormatter('{levelname} {message}', style='{')
        output = formatter.format(make_record(level=logging.WARNING))
        assert '\033[33m' in output
        assert output.endswith('hello')

    def test_run_context_is_thread_local(self):
        import threading

        set_run_context(run_id='main')
        seen = {}
        worker = threading.Thread(target=lambda: seen.update(get_run_context()))
        worker.start()
        worker.join()
        assert seen == {}
        assert get_run_context()['run_id'] == 'main'


class TestStructuredLogger:
    def test_format_log(self):
        entry = LogFormatter.format_log('INFO', 'sweep_started', {'points': 4},
                                        run_id='r1', system='HARVEST')
        assert entry['event'] == 'sweep_started'
        assert entry['details'] == {'points': 4}
        assert entry['run_id'] == 'r1'
        assert 'error' not in entry

    def test_run_id_from_context(self):
        set_run_context(run_id='ctx')
        assert LogFormatter.format_log('INFO', 'x')['run_id'] == 'ctx'

    def test_message_and_extra(self, caplog):
        slogger = create_logger('harvestkit.test')
        assert isinstance(slogger, StructuredLogger)
        with caplog.at_level(logging.INFO, logger='harvestkit.test'):
            slogger.info('point_done', index=3, negativity=0.5, hidden='x')
        record = caplog.records[-1]
        assert record.getMessage().startswith('[point_done]')
        assert "'index': 3" in record.getMessage()
        assert 'hidden' not in record.getMessage()
        assert record.extra_data['details']['hidden'] == 'x'

    def test_error_and_exception(self, caplog):
        slogger = create_logger('harvestkit.test')
        with caplog.at_level(logging.DEBUG, logger='harvestkit.test'):
            slogger.error('point_failed', error='diverged', a=1.0)
            try:
                raise ValueError('bad')
            except ValueError as exc:
                slogger.exception('crash', exc)
                log_exception(logging.getLogger('harvestkit.test'), 'context', exc,
                              point=4)
        messages = [r.getMessage() for r in caplog.records]
        assert messages[0].startswith('[point_failed] error=diverged')
        assert caplog.records[1].extra_data['exception_type'] == 'ValueError'
        assert caplog.records[2].extra_data == {'point': 4}
